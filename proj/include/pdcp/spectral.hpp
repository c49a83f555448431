#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "pdcp/types.hpp"

namespace pdcp {

// One-step matrix of the zero-data bilinear model (f = g* = 0, L = 1) on the
// pair (x, y).
Eigen::Matrix2d iteration_matrix(double tau, double sigma, double theta);

// Closed-form eigenvalues of that matrix; the first entry takes the + branch
// of the radical, so beyond the step-size edge the second entry is the one at
// or below -1.
std::pair<std::complex<double>, std::complex<double>> bilinear_eigenvalues(
    double tau, double sigma, double theta);

enum class SpectralVerdict { convergent, boundary_oscillatory, divergent };

const char* to_string(SpectralVerdict v);

struct RegimeClassification {
  std::complex<double> lambda1, lambda2;
  double spectral_radius;
  SpectralVerdict verdict;
};

RegimeClassification classify_bilinear(double tau, double sigma, double theta);

struct TightnessRow {
  double theta;
  double tau_sigma;
  std::complex<double> lambda1, lambda2;
  double radius;
  SpectralVerdict analytic;
  SpectralVerdict empirical;
};

// Analytic verdict on each (theta, tau sigma) grid point, cross-checked by
// driving the actual iteration on the zero-data model from (1, 1) with
// tau = sigma = sqrt(tau sigma). Rows come back in grid order (theta outer).
std::vector<TightnessRow> tightness_map(const std::vector<double>& thetas,
                                        const std::vector<double>& products,
                                        long empirical_iters = 10000,
                                        int workers = 0);

std::vector<double> linspace(double lo, double hi, int count);

}  // namespace pdcp
