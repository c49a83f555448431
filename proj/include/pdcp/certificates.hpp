#pragma once

#include <memory>
#include <vector>

#include "pdcp/solver.hpp"

namespace pdcp {

enum class SaddleProvenance { analytic, oracle_run };

struct SaddleRef {
  PrimalVec x_star;
  DualVec y_star;
  SaddleProvenance provenance = SaddleProvenance::analytic;
  double kkt_residual = 0.0;  // worst sampled subgradient violation
};

// Sampled check of the optimality inclusions -L* y* ∈ ∂f(x*) and
// L x* ∈ ∂g*(y*). Returns the worse of the two signed violations (negative
// values mean both held with margin).
double measure_kkt_residual(const SaddleRef& ref, const ProxFunction& f,
                            const ProxFunction& gstar, const LinOp& L,
                            int samples = 1000, unsigned seed = 7);

struct Coefficients {
  double coeff_pos;       // 8 theta - tau sigma ||L||^2 (4 theta^2 + 1)
  double mixing_ratio;    // 4 (1 - tau sigma theta ||L||^2) / coeff_pos
  double coeff_nonneg;    // damping weight on ||x_{k+1} - x_k||^2
  double boundary_coeff;  // (2 theta - 1) / (4 tau (1 + 2 theta))
  bool ratio_defined;     // false when coeff_pos vanishes
};

Coefficients eval_coefficients(const SolverConfig& cfg);

// Pointwise certificate quantities against a fixed reference saddle.
//   F_k = f(x_{k+1}) - f(x*) + <L* y*, x_{k+1} - x*>
//   G_k = g*(y_{k+1}) - g*(y*) - <L x*, y_{k+1} - y*>
//   gap(x, y) = Lagrangian(x, y*) - Lagrangian(x*, y)
double eval_F(const PrimalVec& x_next, const SaddleRef& ref,
              const ProxFunction& f, const LinOp& L);
double eval_G(const DualVec& y_next, const SaddleRef& ref,
              const ProxFunction& gstar, const LinOp& L);
double eval_gap(const PrimalVec& x, const DualVec& y, const SaddleRef& ref,
                const ProxFunction& f, const ProxFunction& gstar,
                const LinOp& L);

// The descent quantity at index k, from the window (x_k, x_{k+1}, y_k):
//   V_k = theta F_k + ||x_{k+1} - x*||^2 / (2 tau)
//       + ||y_k - y* + sigma theta (L x_{k+1} - L x_k)||^2 / (2 sigma)
//       + theta ||x_{k+1} - x_k||^2 / (2 tau)
//       - sigma (4 theta^2 + 1) ||L x_{k+1} - L x_k||^2 / 16
double eval_lyapunov(const PrimalVec& x_k, const PrimalVec& x_k1,
                     const DualVec& y_k, const DualVec& Lx_k,
                     const DualVec& Lx_k1, const SaddleRef& ref,
                     const SolverConfig& cfg, const ProxFunction& f,
                     const LinOp& L);

struct CertificateRecord {
  long k;
  double F, G, gap, V;
  double lyap_lhs;  // V_{k+1} - V_k + F_k + G_k
  // The three nonpositive right-side terms of the descent inequality.
  double rhs_dual, rhs_xcombo, rhs_xdamp;
  double lyap_residual;  // lhs - rhs; admissible runs keep it <= tol
  double coeff_pos, coeff_nonneg;
  // Signed residuals of the four one-step inequalities (lhs - rhs each).
  double interp_g, interp_f, interp_fdiff, interp_fdiff_rev;
  double boundary_residual;  // NaN outside boundary mode
  double lag2_sq;            // ||x_{k+2} - x_k||^2
};

struct Violation {
  long k;
  std::string kind;
  double value, tol;
};

struct CertificateSummary {
  double V0 = 0.0;
  double min_F = 0.0, min_G = 0.0, min_V = 0.0, min_gap = 0.0;
  double max_lyap_residual = 0.0;
  double max_gap_identity_error = 0.0;
  double max_interp_residual = 0.0;
  double telescope_margin = 0.0;  // min over K of V0 + K tol - sum(F+G)
  double ergodic_margin = 0.0;    // min over K of V0 + K tol - K gap(avg)
  double boundary_sum_sq = 0.0;   // sum of ||x_{k+2} - x_k||^2
  double boundary_budget = 0.0;   // V0 * 4 tau (1 + 2 theta) / (2 theta - 1)
  double boundary_margin = 0.0;   // min over K of budget - partial sum
  double final_lag2 = 0.0;        // last ||x_{k+2} - x_k||
  long records = 0;
  std::vector<Violation> violations;
};

struct EngineOptions {
  bool interpolation = true;
  bool boundary = false;       // check the tight-edge form and its summability
  bool keep_records = true;
  bool corrupt_F_sign = false;  // negative control: feeds -F_k into every check
};

// Streams solver windows and evaluates every certificate one step behind the
// iteration (the descent inequality at k needs x_{k+2}). Violations are
// collected, never thrown; non-finite values throw CertificateError.
class CertificateEngine {
 public:
  CertificateEngine(const ProxFunction& f, const ProxFunction& gstar,
                    const LinOp& L, const SaddleRef& ref,
                    const SolverConfig& cfg, EngineOptions opts = {});

  void feed(const StepWindow& w);
  CertificateSummary finish();

  const std::vector<CertificateRecord>& records() const { return records_; }
  double V0() const { return V0_; }

 private:
  struct Held;  // previous window plus its certificate values

  void finalize_previous(const StepWindow& w, double F1, double V1);
  void check(long k, const char* kind, double value, double tol, bool lower_ok);

  const ProxFunction& f_;
  const ProxFunction& gstar_;
  const LinOp& L_;
  SaddleRef ref_;
  SolverConfig cfg_;
  EngineOptions opts_;

  PrimalVec Lstar_ystar_;
  DualVec Lx_star_;
  double f_star_, gstar_star_;
  Coefficients coeffs_;

  // Compensated (Neumaier) accumulators for the ergodic averages.
  PrimalVec xsum_, xcomp_;
  DualVec ysum_, ycomp_, lxsum_, lxcomp_;
  long count_ = 0;

  std::unique_ptr<Held> prev_;
  double V0_ = std::numeric_limits<double>::quiet_NaN();
  double sum_FG_ = 0.0;
  CertificateSummary sum_;
  std::vector<CertificateRecord> records_;
  bool finished_ = false;
};

struct CertifiedRun {
  RunResult result;
  CertificateSummary summary;
  std::vector<CertificateRecord> records;
};

CertifiedRun certified_run(const ProxFunction& f, const ProxFunction& gstar,
                           const LinOp& L, const SolverConfig& cfg,
                           const SaddleRef& ref, const EngineOptions& opts = {},
                           const RunOptions& run_opts = {});

// Long interior-regime run (theta = 1, tau sigma ||L||^2 = 0.9) whose final
// pair becomes the reference saddle, accepted only if the sampled optimality
// check clears target_kkt.
SaddleRef bootstrap_saddle(const ProxFunction& f, const ProxFunction& gstar,
                           const LinOp& L, const PrimalVec& x0,
                           const DualVec& y0, long budget = 1000000,
                           double target_kkt = 1e-9, unsigned seed = 7,
                           double tau_over_sigma = 1.0);

struct ProblemInstance;
// Packaged reference when the problem carries one (unless force_bootstrap),
// otherwise bootstrap_saddle on the problem's pieces.
SaddleRef derive_saddle_ref(const ProblemInstance& problem,
                            long budget = 1000000,
                            bool force_bootstrap = false);

}  // namespace pdcp
