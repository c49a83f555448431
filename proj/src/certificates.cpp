#include "pdcp/certificates.hpp"

#include <cmath>

namespace pdcp {

namespace {

// Tolerance policy. Descent-side checks scale with 1 + V0, gap-side checks
// with 1 + |gap|; the interpolation inequalities and the per-step slack of
// the telescoped bounds are absolute.
constexpr double kSignTol = 1e-8;
constexpr double kGapIdTol = 1e-10;
constexpr double kVSignTol = 1e-10;
constexpr double kLyapTol = 1e-8;
constexpr double kInterpTol = 1e-8;
constexpr double kPerStepTol = 1e-8;

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw CertificateError(std::string(what) + " is not finite");
  return v;
}

// Neumaier-compensated accumulation, componentwise.
void kadd(Vec& sum, Vec& comp, const Vec& x) {
  for (int i = 0; i < sum.size(); ++i) {
    double t = sum(i) + x(i);
    if (std::abs(sum(i)) >= std::abs(x(i)))
      comp(i) += (sum(i) - t) + x(i);
    else
      comp(i) += (x(i) - t) + sum(i);
    sum(i) = t;
  }
}

namespace formula {

double F(double fx1, double f_star, const PrimalVec& Lstar_ystar,
         const PrimalVec& x1, const PrimalVec& x_star) {
  return fx1 - f_star + Lstar_ystar.dot(x1 - x_star);
}

double G(double gy1, double gstar_star, const DualVec& Lx_star,
         const DualVec& y1, const DualVec& y_star) {
  return gy1 - gstar_star - Lx_star.dot(y1 - y_star);
}

double gap(double fx, double gy, double f_star, double gstar_star,
           const DualVec& Lx, const DualVec& Lx_star, const DualVec& y,
           const DualVec& y_star) {
  return fx + y_star.dot(Lx) - gstar_star - f_star - y.dot(Lx_star) + gy;
}

double V(double Fk, double tau, double sigma, double theta,
         const PrimalVec& x_k, const PrimalVec& x_k1, const DualVec& y_k,
         const DualVec& Lx_k, const DualVec& Lx_k1, const PrimalVec& x_star,
         const DualVec& y_star) {
  DualVec dLx = Lx_k1 - Lx_k;
  return theta * Fk + (x_k1 - x_star).squaredNorm() / (2.0 * tau) +
         (y_k - y_star + sigma * theta * dLx).squaredNorm() / (2.0 * sigma) +
         theta * (x_k1 - x_k).squaredNorm() / (2.0 * tau) -
         sigma * (4.0 * theta * theta + 1.0) * dLx.squaredNorm() / 16.0;
}

}  // namespace formula

}  // namespace

Coefficients eval_coefficients(const SolverConfig& cfg) {
  if (!(cfg.tau > 0.0) || !(cfg.sigma > 0.0))
    throw ConfigError("eval_coefficients: tau and sigma must be positive");
  if (!(cfg.op_norm > 0.0))
    throw ConfigError("eval_coefficients: op_norm must be positive");
  if (!std::isfinite(cfg.theta))
    throw ConfigError("eval_coefficients: theta must be finite");

  const double theta = cfg.theta;
  const double s = cfg.tau * cfg.sigma * cfg.op_norm * cfg.op_norm;
  Coefficients c;
  c.coeff_pos = 8.0 * theta - s * (4.0 * theta * theta + 1.0);
  c.ratio_defined = c.coeff_pos != 0.0;
  if (c.ratio_defined) {
    c.mixing_ratio = 4.0 * (1.0 - s * theta) / c.coeff_pos;
    c.coeff_nonneg = (4.0 * theta * theta - 1.0) *
                     (4.0 - s * (2.0 * theta + 1.0)) *
                     (4.0 - s * (2.0 * theta - 1.0)) /
                     (16.0 * cfg.tau * c.coeff_pos);
  } else {
    c.mixing_ratio = std::numeric_limits<double>::quiet_NaN();
    c.coeff_nonneg = std::numeric_limits<double>::quiet_NaN();
  }
  c.boundary_coeff =
      (2.0 * theta - 1.0) / (4.0 * cfg.tau * (1.0 + 2.0 * theta));
  return c;
}

double eval_F(const PrimalVec& x_next, const SaddleRef& ref,
              const ProxFunction& f, const LinOp& L) {
  double fx = finite_or_throw(f.eval(x_next), "f(x_{k+1})");
  double fs = finite_or_throw(f.eval(ref.x_star), "f(x*)");
  return formula::F(fx, fs, L.adjoint(ref.y_star), x_next, ref.x_star);
}

double eval_G(const DualVec& y_next, const SaddleRef& ref,
              const ProxFunction& gstar, const LinOp& L) {
  double gy = finite_or_throw(gstar.eval(y_next), "g*(y_{k+1})");
  double gs = finite_or_throw(gstar.eval(ref.y_star), "g*(y*)");
  return formula::G(gy, gs, L.apply(ref.x_star), y_next, ref.y_star);
}

double eval_gap(const PrimalVec& x, const DualVec& y, const SaddleRef& ref,
                const ProxFunction& f, const ProxFunction& gstar,
                const LinOp& L) {
  double fx = finite_or_throw(f.eval(x), "f(x)");
  double gy = finite_or_throw(gstar.eval(y), "g*(y)");
  double fs = finite_or_throw(f.eval(ref.x_star), "f(x*)");
  double gs = finite_or_throw(gstar.eval(ref.y_star), "g*(y*)");
  return formula::gap(fx, gy, fs, gs, L.apply(x), L.apply(ref.x_star), y,
                      ref.y_star);
}

double eval_lyapunov(const PrimalVec& x_k, const PrimalVec& x_k1,
                     const DualVec& y_k, const DualVec& Lx_k,
                     const DualVec& Lx_k1, const SaddleRef& ref,
                     const SolverConfig& cfg, const ProxFunction& f,
                     const LinOp& L) {
  if (!(cfg.tau > 0.0) || !(cfg.sigma > 0.0))
    throw ConfigError("eval_lyapunov: tau and sigma must be positive");
  double Fk = eval_F(x_k1, ref, f, L);
  return formula::V(Fk, cfg.tau, cfg.sigma, cfg.theta, x_k, x_k1, y_k, Lx_k,
                    Lx_k1, ref.x_star, ref.y_star);
}

double measure_kkt_residual(const SaddleRef& ref, const ProxFunction& f,
                            const ProxFunction& gstar, const LinOp& L,
                            int samples, unsigned seed) {
  if (samples < 2) throw ConfigError("measure_kkt_residual: need at least 2 samples");
  // Half the cloud is mapped through the prox so indicator-type domains are
  // actually exercised (raw Gaussian samples almost never land in a small
  // box in high dimension, which would make the check vacuous).
  auto build = [&](const Vec& center, const ProxFunction& fn,
                   unsigned s) -> std::vector<Vec> {
    std::vector<Vec> raw = inclusion_samples(center, samples, s);
    for (int i = 0; i < samples / 2; ++i) raw[i] = fn.prox(1.0, raw[i]);
    return raw;
  };
  PrimalVec sf = -L.adjoint(ref.y_star);
  SubgradientCheck cx =
      check_subgradient_inequality(f, ref.x_star, sf, build(ref.x_star, f, seed));
  DualVec sg = L.apply(ref.x_star);
  SubgradientCheck cy = check_subgradient_inequality(
      gstar, ref.y_star, sg, build(ref.y_star, gstar, seed + 1));
  return std::max(cx.worst_violation, cy.worst_violation);
}

struct CertificateEngine::Held {
  long k;
  PrimalVec x_k, x_k1;
  DualVec y_k, y_k1, Lx_k, Lx_k1;
  double F, G, gap, V;
};

CertificateEngine::CertificateEngine(const ProxFunction& f,
                                     const ProxFunction& gstar, const LinOp& L,
                                     const SaddleRef& ref,
                                     const SolverConfig& cfg,
                                     EngineOptions opts)
    : f_(f), gstar_(gstar), L_(L), ref_(ref), cfg_(cfg), opts_(opts) {
  if (!(cfg_.tau > 0.0) || !(cfg_.sigma > 0.0))
    throw ConfigError("CertificateEngine: tau and sigma must be positive");
  if (ref_.x_star.size() != L_.in_dim() || ref_.y_star.size() != L_.out_dim())
    throw ConfigError("CertificateEngine: reference dimensions do not match operator");
  if (opts_.boundary) {
    double s = cfg_.tau * cfg_.sigma * cfg_.op_norm * cfg_.op_norm;
    if (!(cfg_.theta > 0.5))
      throw ConfigError("boundary certificates need theta > 1/2");
    if (std::abs(s * (1.0 + 2.0 * cfg_.theta) - 4.0) > 4.0 * 1e-12)
      throw ConfigError(
          "boundary certificates need tau*sigma*||L||^2 = 4/(1+2*theta) "
          "(within 1e-12 relative)");
  }

  Lstar_ystar_ = L_.adjoint(ref_.y_star);
  Lx_star_ = L_.apply(ref_.x_star);
  f_star_ = finite_or_throw(f_.eval(ref_.x_star), "f(x*)");
  gstar_star_ = finite_or_throw(gstar_.eval(ref_.y_star), "g*(y*)");
  coeffs_ = eval_coefficients(cfg_);

  xsum_ = PrimalVec::Zero(L_.in_dim());
  xcomp_ = PrimalVec::Zero(L_.in_dim());
  ysum_ = DualVec::Zero(L_.out_dim());
  ycomp_ = DualVec::Zero(L_.out_dim());
  lxsum_ = DualVec::Zero(L_.out_dim());
  lxcomp_ = DualVec::Zero(L_.out_dim());

  sum_.min_F = sum_.min_G = sum_.min_V = sum_.min_gap = kInf;
  sum_.max_lyap_residual = -kInf;
  sum_.max_gap_identity_error = 0.0;
  sum_.max_interp_residual = -kInf;
  sum_.telescope_margin = kInf;
  sum_.ergodic_margin = kInf;
  sum_.boundary_margin = kInf;
}

void CertificateEngine::check(long k, const char* kind, double value,
                              double tol, bool lower_ok) {
  // lower_ok: the check is "value >= -tol"; otherwise "value <= tol".
  bool bad = lower_ok ? value < -tol : value > tol;
  if (bad) sum_.violations.push_back({k, kind, value, tol});
}

void CertificateEngine::feed(const StepWindow& w) {
  if (finished_) throw CertificateError("certificate engine already finished");
  if (w.k != count_)
    throw CertificateError("certificate engine fed out of order (expected step " +
                           std::to_string(count_) + ", got " +
                           std::to_string(w.k) + ")");

  double fx1 = finite_or_throw(f_.eval(w.x_k1), "f(x_{k+1})");
  double gy1 = finite_or_throw(gstar_.eval(w.y_k1), "g*(y_{k+1})");
  double F = formula::F(fx1, f_star_, Lstar_ystar_, w.x_k1, ref_.x_star);
  if (opts_.corrupt_F_sign) F = -F;
  double G = formula::G(gy1, gstar_star_, Lx_star_, w.y_k1, ref_.y_star);
  finite_or_throw(F + G, "F_k + G_k");
  double gap = formula::gap(fx1, gy1, f_star_, gstar_star_, w.Lx_k1, Lx_star_,
                            w.y_k1, ref_.y_star);
  double V = formula::V(F, cfg_.tau, cfg_.sigma, cfg_.theta, w.x_k, w.x_k1,
                        w.y_k, w.Lx_k, w.Lx_k1, ref_.x_star, ref_.y_star);
  if (w.k == 0) {
    V0_ = V;
    sum_.V0 = V;
  }

  double gap_scale = 1.0 + std::abs(gap);
  check(w.k, "F_sign", F, kSignTol * gap_scale, true);
  check(w.k, "G_sign", G, kSignTol * gap_scale, true);
  check(w.k, "gap_sign", gap, kSignTol * gap_scale, true);
  check(w.k, "gap_identity", std::abs(F + G - gap), kGapIdTol * gap_scale, false);
  check(w.k, "V_sign", V, kVSignTol * (1.0 + V0_), true);

  sum_.min_F = std::min(sum_.min_F, F);
  sum_.min_G = std::min(sum_.min_G, G);
  sum_.min_V = std::min(sum_.min_V, V);
  sum_.min_gap = std::min(sum_.min_gap, gap);
  sum_.max_gap_identity_error =
      std::max(sum_.max_gap_identity_error, std::abs(F + G - gap));

  // Telescoped descent: sum of F + G up to k stays under V0 plus slack.
  sum_FG_ += F + G;
  double tmargin = V0_ + double(w.k + 1) * kPerStepTol - sum_FG_;
  sum_.telescope_margin = std::min(sum_.telescope_margin, tmargin);
  check(w.k, "telescope", -tmargin, 0.0, false);

  // Ergodic envelope: K * gap(xbar_K, ybar_K) <= V0 + K * slack, with the
  // averages over x_1..x_K kept in compensated sums.
  kadd(xsum_, xcomp_, w.x_k1);
  kadd(ysum_, ycomp_, w.y_k1);
  kadd(lxsum_, lxcomp_, w.Lx_k1);
  count_ = w.k + 1;
  double K = double(count_);
  PrimalVec xavg = (xsum_ + xcomp_) / K;
  DualVec yavg = (ysum_ + ycomp_) / K;
  DualVec lxavg = (lxsum_ + lxcomp_) / K;
  double fxa = finite_or_throw(f_.eval(xavg), "f(xbar)");
  double gya = finite_or_throw(gstar_.eval(yavg), "g*(ybar)");
  double gap_avg = formula::gap(fxa, gya, f_star_, gstar_star_, lxavg, Lx_star_,
                                yavg, ref_.y_star);
  double emargin = V0_ + K * kPerStepTol - K * gap_avg;
  sum_.ergodic_margin = std::min(sum_.ergodic_margin, emargin);
  check(w.k, "ergodic_envelope", -emargin, 0.0, false);

  if (prev_) finalize_previous(w, F, V);

  prev_ = std::make_unique<Held>(Held{w.k, w.x_k, w.x_k1, w.y_k, w.y_k1,
                                      w.Lx_k, w.Lx_k1, F, G, gap, V});
}

void CertificateEngine::finalize_previous(const StepWindow& w, double F1,
                                          double V1) {
  const Held& p = *prev_;
  const double tau = cfg_.tau, sigma = cfg_.sigma, theta = cfg_.theta;

  double lhs = V1 - p.V + p.F + p.G;

  // y_{j+1} - y_j - sigma (0.5 (L x_{j+1} - L x_{j+2}) - theta (L x_j - L x_{j+1}))
  DualVec dual_vec = (p.y_k1 - p.y_k) -
                     sigma * (0.5 * (p.Lx_k1 - w.Lx_k1) - theta * (p.Lx_k - p.Lx_k1));
  double rhs_dual = -dual_vec.squaredNorm() / (2.0 * sigma);

  CertificateRecord rec;
  rec.k = p.k;
  rec.F = p.F;
  rec.G = p.G;
  rec.gap = p.gap;
  rec.V = p.V;
  rec.lyap_lhs = lhs;
  rec.rhs_dual = rhs_dual;
  rec.coeff_pos = coeffs_.coeff_pos;
  rec.coeff_nonneg = coeffs_.coeff_nonneg;
  rec.boundary_residual = std::numeric_limits<double>::quiet_NaN();
  rec.lag2_sq = (w.x_k1 - p.x_k).squaredNorm();
  sum_.final_lag2 = std::sqrt(rec.lag2_sq);

  if (coeffs_.ratio_defined && coeffs_.coeff_pos > 0.0) {
    PrimalVec xcombo = (w.x_k1 - p.x_k1) - coeffs_.mixing_ratio * (p.x_k1 - p.x_k);
    rec.rhs_xcombo = -coeffs_.coeff_pos / (16.0 * tau) * xcombo.squaredNorm();
    rec.rhs_xdamp = -coeffs_.coeff_nonneg * (p.x_k1 - p.x_k).squaredNorm();
    rec.lyap_residual = lhs - (rhs_dual + rec.rhs_xcombo + rec.rhs_xdamp);
    check(p.k, "lyapunov_descent", rec.lyap_residual, kLyapTol * (1.0 + V0_), false);
    sum_.max_lyap_residual = std::max(sum_.max_lyap_residual, rec.lyap_residual);
  } else {
    // Outside the admissible region the split right side is meaningless.
    rec.rhs_xcombo = rec.rhs_xdamp = std::numeric_limits<double>::quiet_NaN();
    rec.lyap_residual = std::numeric_limits<double>::quiet_NaN();
  }

  if (opts_.interpolation) {
    rec.interp_g = p.G - ((p.y_k - p.y_k1).dot(p.y_k1 - ref_.y_star) / sigma +
                          (p.Lx_k1 - Lx_star_).dot(p.y_k1 - ref_.y_star) +
                          theta * (p.Lx_k1 - p.Lx_k).dot(p.y_k1 - ref_.y_star));
    rec.interp_f = F1 - ((p.x_k1 - w.x_k1).dot(w.x_k1 - ref_.x_star) / tau +
                         (ref_.y_star - p.y_k1).dot(w.Lx_k1 - Lx_star_));
    rec.interp_fdiff =
        (F1 - p.F) - (-(w.x_k1 - p.x_k1).squaredNorm() / tau +
                      (ref_.y_star - p.y_k1).dot(w.Lx_k1 - p.Lx_k1));
    rec.interp_fdiff_rev =
        (p.F - F1) - ((p.x_k - p.x_k1).dot(p.x_k1 - w.x_k1) / tau +
                      (ref_.y_star - p.y_k).dot(p.Lx_k1 - w.Lx_k1));
    check(p.k, "interp_g", rec.interp_g, kInterpTol, false);
    check(p.k, "interp_f", rec.interp_f, kInterpTol, false);
    check(p.k, "interp_fdiff", rec.interp_fdiff, kInterpTol, false);
    check(p.k, "interp_fdiff_rev", rec.interp_fdiff_rev, kInterpTol, false);
    double worst = std::max({rec.interp_g, rec.interp_f, rec.interp_fdiff,
                             rec.interp_fdiff_rev});
    sum_.max_interp_residual = std::max(sum_.max_interp_residual, worst);
  } else {
    rec.interp_g = rec.interp_f = rec.interp_fdiff = rec.interp_fdiff_rev =
        std::numeric_limits<double>::quiet_NaN();
  }

  if (opts_.boundary) {
    rec.boundary_residual =
        lhs - (rhs_dual - coeffs_.boundary_coeff * rec.lag2_sq);
    check(p.k, "boundary_descent", rec.boundary_residual,
          kLyapTol * (1.0 + V0_), false);
    sum_.boundary_sum_sq += rec.lag2_sq;
    sum_.boundary_budget =
        V0_ * 4.0 * tau * (1.0 + 2.0 * theta) / (2.0 * theta - 1.0);
    double bmargin = sum_.boundary_budget - sum_.boundary_sum_sq;
    sum_.boundary_margin = std::min(sum_.boundary_margin, bmargin);
    check(p.k, "boundary_summability", -bmargin, 0.0, false);
  }

  ++sum_.records;
  if (opts_.keep_records) records_.push_back(rec);
}

CertificateSummary CertificateEngine::finish() {
  finished_ = true;
  if (count_ == 0) {
    sum_.min_F = sum_.min_G = sum_.min_V = sum_.min_gap = 0.0;
    sum_.telescope_margin = sum_.ergodic_margin = 0.0;
  }
  if (sum_.records == 0) sum_.max_lyap_residual = 0.0;
  if (sum_.records == 0 || !opts_.interpolation) sum_.max_interp_residual = 0.0;
  if (!opts_.boundary || sum_.records == 0) sum_.boundary_margin = 0.0;
  return sum_;
}

CertifiedRun certified_run(const ProxFunction& f, const ProxFunction& gstar,
                           const LinOp& L, const SolverConfig& cfg,
                           const SaddleRef& ref, const EngineOptions& opts,
                           const RunOptions& run_opts) {
  CertificateEngine engine(f, gstar, L, ref, cfg, opts);
  RunOptions ro = run_opts;
  StepObserver user = run_opts.observer;
  ro.observer = [&engine, &user](const StepWindow& w) {
    engine.feed(w);
    if (user) user(w);
  };
  CertifiedRun out{run(f, gstar, L, cfg, ro), {}, {}};
  out.summary = engine.finish();
  out.records = engine.records();
  return out;
}

SaddleRef bootstrap_saddle(const ProxFunction& f, const ProxFunction& gstar,
                           const LinOp& L, const PrimalVec& x0,
                           const DualVec& y0, long budget, double target_kkt,
                           unsigned seed, double tau_over_sigma) {
  if (!(L.norm_estimate() > 0.0))
    throw ConfigError("bootstrap_saddle: operator norm estimate must be positive");
  if (!(tau_over_sigma > 0.0))
    throw ConfigError("bootstrap_saddle: tau_over_sigma must be positive");

  SolverConfig cfg;
  cfg.theta = 1.0;
  cfg.op_norm = L.norm_estimate();
  cfg.tau = std::sqrt(0.9 * tau_over_sigma) / cfg.op_norm;
  cfg.sigma = std::sqrt(0.9 / tau_over_sigma) / cfg.op_norm;
  cfg.max_iter = budget;
  cfg.stop_tol = 1e-12;
  cfg.regime_check = RegimeCheck::boundary_ok;

  RunOptions opts;
  opts.x0 = x0;
  opts.y0 = y0;
  opts.keep_trace = false;
  RunResult r = run(f, gstar, L, cfg, opts);
  if (r.status == RunStatus::diverged)
    throw ConvergenceError("bootstrap_saddle: interior-regime run diverged",
                           r.diverged_norm);

  SaddleRef ref;
  ref.x_star = r.x;
  ref.y_star = r.y;
  ref.provenance = SaddleProvenance::oracle_run;
  ref.kkt_residual = measure_kkt_residual(ref, f, gstar, L, 1000, seed);
  if (!(ref.kkt_residual <= target_kkt))
    throw ConvergenceError(
        "bootstrap_saddle: sampled optimality residual " +
            std::to_string(ref.kkt_residual) + " above target " +
            std::to_string(target_kkt) + " after " +
            std::to_string(r.iterations) + " iterations",
        ref.kkt_residual);
  return ref;
}

}  // namespace pdcp
