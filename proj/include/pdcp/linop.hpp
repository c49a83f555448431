#pragma once

#include <functional>
#include <optional>

#include "pdcp/types.hpp"

namespace pdcp {

// Linear coupling operator with its adjoint and a cached norm estimate.
// Matrix-free by construction; from_matrix wraps a dense matrix and, when a
// dense SVD is cheap (max dimension <= 500), records the exact norm instead
// of an estimate.
class LinOp {
 public:
  using Forward = std::function<DualVec(const PrimalVec&)>;
  using Adjoint = std::function<PrimalVec(const DualVec&)>;

  LinOp(int in_dim, int out_dim, Forward forward, Adjoint adjoint,
        double norm_estimate, bool norm_is_exact = false);

  static LinOp from_matrix(Matrix A);
  static LinOp scaled_identity(int n, double scale);

  DualVec apply(const PrimalVec& x) const;
  PrimalVec adjoint(const DualVec& y) const;

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  double norm_estimate() const { return norm_estimate_; }
  bool norm_is_exact() const { return norm_is_exact_; }
  void set_norm_estimate(double value, bool exact = false);

  // Dense form when the operator was built from one, else nullptr.
  const Matrix* matrix() const { return dense_ ? &*dense_ : nullptr; }

 private:
  int in_dim_;
  int out_dim_;
  Forward forward_;
  Adjoint adjoint_;
  double norm_estimate_;
  bool norm_is_exact_;
  std::optional<Matrix> dense_;
};

// Power iteration on L*L. Returns an estimate of ||L|| once successive
// values agree to |est_{k+1} - est_k| <= tol * est_{k+1}; throws
// ConvergenceError (carrying the last estimate) if the budget runs out first.
double estimate_operator_norm(const LinOp& op, double tol = 1e-12,
                              int max_iter = 20000, unsigned seed = 0);

}  // namespace pdcp
