#include "pdcp/linop.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <utility>

namespace pdcp {

double inner(const Vec& a, const Vec& b) {
  if (a.size() != b.size())
    throw ConfigError("inner: dimension mismatch (" + std::to_string(a.size()) +
                      " vs " + std::to_string(b.size()) + ")");
  return a.dot(b);
}

double norm(const Vec& a) { return a.norm(); }

LinOp::LinOp(int in_dim, int out_dim, Forward forward, Adjoint adjoint,
             double norm_estimate, bool norm_is_exact)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      forward_(std::move(forward)),
      adjoint_(std::move(adjoint)),
      norm_estimate_(norm_estimate),
      norm_is_exact_(norm_is_exact) {
  if (in_dim_ <= 0 || out_dim_ <= 0)
    throw ConfigError("LinOp: dimensions must be positive");
  if (!(norm_estimate_ >= 0.0) || !std::isfinite(norm_estimate_))
    throw ConfigError("LinOp: norm estimate must be finite and nonnegative");
}

LinOp LinOp::from_matrix(Matrix A) {
  if (A.rows() == 0 || A.cols() == 0)
    throw ConfigError("LinOp::from_matrix: empty matrix");
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  auto shared = std::make_shared<Matrix>(std::move(A));
  LinOp op(
      n, m, [shared](const PrimalVec& x) -> DualVec { return (*shared) * x; },
      [shared](const DualVec& y) -> PrimalVec {
        return shared->transpose() * y;
      },
      0.0, false);
  op.dense_ = *shared;
  if (std::max(m, n) <= 500) {
    op.norm_estimate_ = Eigen::JacobiSVD<Matrix>(*shared).singularValues()(0);
    op.norm_is_exact_ = true;
  } else {
    op.norm_estimate_ = estimate_operator_norm(op);
  }
  return op;
}

LinOp LinOp::scaled_identity(int n, double scale) {
  if (n <= 0) throw ConfigError("LinOp::scaled_identity: dimension must be positive");
  return LinOp(
      n, n, [scale](const PrimalVec& x) -> DualVec { return scale * x; },
      [scale](const DualVec& y) -> PrimalVec { return scale * y; },
      std::abs(scale), true);
}

DualVec LinOp::apply(const PrimalVec& x) const {
  if (x.size() != in_dim_)
    throw ConfigError("LinOp::apply: expected dimension " +
                      std::to_string(in_dim_) + ", got " +
                      std::to_string(x.size()));
  DualVec y = forward_(x);
  if (y.size() != out_dim_)
    throw ConfigError("LinOp::apply: forward map returned dimension " +
                      std::to_string(y.size()));
  return y;
}

PrimalVec LinOp::adjoint(const DualVec& y) const {
  if (y.size() != out_dim_)
    throw ConfigError("LinOp::adjoint: expected dimension " +
                      std::to_string(out_dim_) + ", got " +
                      std::to_string(y.size()));
  PrimalVec x = adjoint_(y);
  if (x.size() != in_dim_)
    throw ConfigError("LinOp::adjoint: adjoint map returned dimension " +
                      std::to_string(x.size()));
  return x;
}

void LinOp::set_norm_estimate(double value, bool exact) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw ConfigError("LinOp::set_norm_estimate: value must be finite and nonnegative");
  norm_estimate_ = value;
  norm_is_exact_ = exact;
}

double estimate_operator_norm(const LinOp& op, double tol, int max_iter,
                              unsigned seed) {
  if (!(tol > 0.0)) throw ConfigError("estimate_operator_norm: tol must be positive");
  if (max_iter < 1) throw ConfigError("estimate_operator_norm: max_iter must be >= 1");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  PrimalVec v(op.in_dim());
  for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();

  double prev = -1.0;
  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    PrimalVec u = op.adjoint(op.apply(v));
    // With v normalized, <v, L*L v> = ||L v||^2 is the Rayleigh quotient.
    double rayleigh = v.dot(u);
    est = std::sqrt(std::max(rayleigh, 0.0));
    double un = u.norm();
    if (un == 0.0) {
      if (it == 0) {
        // Redraw once in case the start vector landed in the kernel.
        for (int i = 0; i < v.size(); ++i) v(i) = gauss(rng);
        v.normalize();
        continue;
      }
      return 0.0;  // genuinely the zero operator
    }
    if (prev >= 0.0 && std::abs(est - prev) <= tol * est) return est;
    prev = est;
    v = u / un;
  }
  throw ConvergenceError(
      "estimate_operator_norm: no settle within " + std::to_string(max_iter) +
          " iterations (last estimate " + std::to_string(est) + ")",
      est);
}

}  // namespace pdcp
