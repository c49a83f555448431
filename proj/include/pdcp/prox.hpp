#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pdcp/types.hpp"

namespace pdcp {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A convex function presented through the two handles the solver needs:
// pointwise evaluation (may return +inf outside the domain) and the proximal
// map  prox(tau, x) = argmin_z f(z) + ||z - x||^2 / (2 tau).
//
// conjugate_eval / conjugate_prox are optional closed forms consulted when
// the conjugate is requested; conjugate_of falls back to the Moreau identity
// for the prox when no direct form is installed.
struct ProxFunction {
  std::string name;
  std::function<double(const Vec&)> eval;
  std::function<Vec(double, const Vec&)> prox;
  std::function<double(const Vec&)> conjugate_eval;
  std::function<Vec(double, const Vec&)> conjugate_prox;
};

// Catalog prox maps.
Vec prox_zero(double tau, const Vec& x);
Vec prox_l1(double tau, const Vec& x);  // soft threshold at tau
Vec prox_sq_l2(double tau, const Vec& x, const Vec& target, double weight);
Vec prox_box(double tau, const Vec& x, const Vec& lo, const Vec& hi);
// Moreau identity: y - sigma * base.prox(1/sigma, y/sigma).
Vec prox_conjugate(const ProxFunction& base, double sigma, const Vec& y);

// Catalog constructors.
ProxFunction zero_function();
ProxFunction l1_norm(double weight = 1.0);
ProxFunction squared_l2(Vec target, double weight = 1.0);
ProxFunction box_indicator(Vec lo, Vec hi);
ProxFunction conjugate_of(const ProxFunction& base);

struct SubgradientCheck {
  bool ok;
  double worst_violation;  // positive means the inequality failed by that much
};

// Tests s ∈ ∂f(p) by sampling f(z) >= f(p) + <s, z - p> at the given points.
// Samples where f is infinite carry no information and are skipped; the
// tolerance is 1e-9 * (1 + |f(p)|).
SubgradientCheck check_subgradient_inequality(const ProxFunction& fn,
                                              const Vec& p, const Vec& s,
                                              const std::vector<Vec>& samples);

// Gaussian clouds around p, cycling scales {0.1, 1, 10} * (1 + ||p||).
std::vector<Vec> inclusion_samples(const Vec& p, int count, unsigned seed);

}  // namespace pdcp
