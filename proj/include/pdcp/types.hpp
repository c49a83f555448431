#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pdcp {

using Vec = Eigen::VectorXd;
using PrimalVec = Vec;
using DualVec = Vec;
using Matrix = Eigen::MatrixXd;

// Malformed arguments or inadmissible solver configurations.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An iterative estimate failed to settle within its budget. Carries the last
// value so callers can decide whether it is still usable.
struct ConvergenceError : std::runtime_error {
  double last_estimate;
  ConvergenceError(const std::string& msg, double estimate)
      : std::runtime_error(msg), last_estimate(estimate) {}
};

// A certificate quantity could not be evaluated (non-finite values where the
// theory promises finite ones) or an evaluation precondition was broken.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double inner(const Vec& a, const Vec& b);
double norm(const Vec& a);

}  // namespace pdcp
