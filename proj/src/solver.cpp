#include "pdcp/solver.hpp"

#include <cmath>
#include <cstdio>

namespace pdcp {

namespace {

// Detection tolerance for sitting exactly on an admissibility edge.
constexpr double kEdgeTol = 1e-12;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::interior: return "interior";
    case Regime::boundary: return "boundary";
    case Regime::violated: return "violated";
    case Regime::theta_below_half: return "theta_below_half";
  }
  return "?";
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iter_reached: return "max_iter_reached";
    case RunStatus::diverged: return "diverged";
  }
  return "?";
}

RegimeReport validate_config(const SolverConfig& cfg) {
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau))
    throw ConfigError("validate_config: tau must be positive and finite");
  if (!(cfg.sigma > 0.0) || !std::isfinite(cfg.sigma))
    throw ConfigError("validate_config: sigma must be positive and finite");
  if (!std::isfinite(cfg.theta))
    throw ConfigError("validate_config: theta must be finite");
  if (!(cfg.op_norm > 0.0) || !std::isfinite(cfg.op_norm))
    throw ConfigError("validate_config: op_norm must be positive and finite");
  if (cfg.max_iter < 0)
    throw ConfigError("validate_config: max_iter must be nonnegative");
  if (!(cfg.stop_tol >= 0.0))
    throw ConfigError("validate_config: stop_tol must be nonnegative");

  RegimeReport rep;
  rep.product = cfg.tau * cfg.sigma * cfg.op_norm * cfg.op_norm;
  rep.bound = 4.0 / (1.0 + 2.0 * cfg.theta);

  bool theta_edge = std::abs(cfg.theta - 0.5) <= kEdgeTol;
  bool product_edge =
      std::abs(rep.product * (1.0 + 2.0 * cfg.theta) - 4.0) <= kEdgeTol;

  if (!theta_edge && cfg.theta < 0.5) {
    rep.regime = Regime::theta_below_half;
    rep.message = "theta = " + fmt(cfg.theta) + " violates theta >= 1/2";
  } else if (!product_edge && rep.product > rep.bound) {
    rep.regime = Regime::violated;
    rep.message = "tau*sigma*||L||^2 = " + fmt(rep.product) +
                  " exceeds 4/(1+2*theta) = " + fmt(rep.bound);
  } else if (theta_edge && product_edge) {
    // Both inequalities tight: no admissible regime covers this corner.
    rep.regime = Regime::violated;
    rep.message =
        "theta = 1/2 and tau*sigma*||L||^2 = 4/(1+2*theta) are both tight; "
        "at least one must be strict";
  } else if (theta_edge || product_edge) {
    rep.regime = Regime::boundary;
    rep.message = theta_edge ? "theta sits on the edge theta = 1/2"
                             : "tau*sigma*||L||^2 sits on the edge 4/(1+2*theta) = " +
                                   fmt(rep.bound);
  } else {
    rep.regime = Regime::interior;
    rep.message = "tau*sigma*||L||^2 = " + fmt(rep.product) +
                  " < 4/(1+2*theta) = " + fmt(rep.bound) + ", theta > 1/2";
  }

  switch (cfg.regime_check) {
    case RegimeCheck::off:
      break;
    case RegimeCheck::strict:
      if (rep.regime != Regime::interior)
        throw ConfigError("step-size regime (strict policy): " + rep.message);
      break;
    case RegimeCheck::boundary_ok:
      if (rep.regime != Regime::interior && rep.regime != Regime::boundary)
        throw ConfigError("step-size regime: " + rep.message);
      break;
  }
  return rep;
}

IterState init_state(const LinOp& L, PrimalVec x0, DualVec y0) {
  if (x0.size() != L.in_dim())
    throw ConfigError("init_state: x0 dimension " + std::to_string(x0.size()) +
                      " does not match operator (" + std::to_string(L.in_dim()) + ")");
  if (y0.size() != L.out_dim())
    throw ConfigError("init_state: y0 dimension " + std::to_string(y0.size()) +
                      " does not match operator (" + std::to_string(L.out_dim()) + ")");
  IterState s;
  s.x_curr = std::move(x0);
  s.y_curr = std::move(y0);
  // The zero start seeds the image cache without touching the operator, so
  // the per-step operator-evaluation count stays exact from iteration one.
  s.Lx_curr = s.x_curr.isZero(0.0) ? DualVec(DualVec::Zero(L.out_dim()))
                                   : L.apply(s.x_curr);
  s.xbar_sum = PrimalVec::Zero(L.in_dim());
  s.ybar_sum = DualVec::Zero(L.out_dim());
  return s;
}

IterState cp_step(const IterState& s, const SolverConfig& cfg,
                  const ProxFunction& f, const ProxFunction& gstar,
                  const LinOp& L) {
  if (!(cfg.tau > 0.0) || !(cfg.sigma > 0.0))
    throw ConfigError("cp_step: tau and sigma must be positive");
  if (s.x_curr.size() != L.in_dim() || s.y_curr.size() != L.out_dim())
    throw ConfigError("cp_step: state dimensions do not match operator");

  IterState n;
  n.k = s.k + 1;
  n.x_prev = s.x_curr;
  n.y_prev = s.y_curr;
  n.Lx_prev = s.Lx_curr;
  n.x_curr = f.prox(cfg.tau, s.x_curr - cfg.tau * L.adjoint(s.y_curr));
  n.Lx_curr = L.apply(n.x_curr);
  n.y_curr = gstar.prox(
      cfg.sigma,
      s.y_curr + cfg.sigma * (n.Lx_curr + cfg.theta * (n.Lx_curr - s.Lx_curr)));
  n.xbar_sum = s.xbar_sum + n.x_curr;
  n.ybar_sum = s.ybar_sum + n.y_curr;
  n.avg_count = s.avg_count + 1;
  return n;
}

RunResult run(const ProxFunction& f, const ProxFunction& gstar, const LinOp& L,
              const SolverConfig& cfg, const RunOptions& opts) {
  validate_config(cfg);

  PrimalVec x0 = opts.x0 ? *opts.x0 : PrimalVec(PrimalVec::Zero(L.in_dim()));
  DualVec y0 = opts.y0 ? *opts.y0 : DualVec(DualVec::Zero(L.out_dim()));
  IterState s = init_state(L, std::move(x0), std::move(y0));

  RunResult res;
  res.status = RunStatus::max_iter_reached;
  res.iterations = 0;
  res.final_dx = 0.0;
  res.final_dy = 0.0;
  if (opts.keep_trace) res.trace.reserve(std::min<long>(cfg.max_iter, 1 << 20));

  PrimalVec x_prev_prev;  // x_{k-1} relative to the step about to run
  for (long k = 0; k < cfg.max_iter; ++k) {
    x_prev_prev = std::move(s.x_prev);
    s = cp_step(s, cfg, f, gstar, L);
    res.iterations = k + 1;

    double dx = (s.x_curr - s.x_prev).norm();
    double dy = (s.y_curr - s.y_prev).norm();
    double lag2 = k >= 1 ? (s.x_curr - x_prev_prev).norm() : 0.0;
    res.final_dx = dx;
    res.final_dy = dy;
    if (opts.keep_trace) res.trace.push_back({k, dx, dy, lag2});

    double xn = s.x_curr.norm();
    double yn = s.y_curr.norm();
    if (!std::isfinite(xn) || !std::isfinite(yn) || xn > kDivergenceNorm ||
        yn > kDivergenceNorm) {
      res.status = RunStatus::diverged;
      res.diverged_at = k;
      res.diverged_norm = std::isfinite(xn) && std::isfinite(yn)
                              ? std::max(xn, yn)
                              : std::numeric_limits<double>::infinity();
      break;
    }

    if (opts.observer)
      opts.observer(StepWindow{k, s.x_prev, s.x_curr, s.y_prev, s.y_curr,
                               s.Lx_prev, s.Lx_curr, dx, dy});

    if (cfg.stop_tol > 0.0 && dx + dy <= cfg.stop_tol * (1.0 + xn + yn)) {
      res.status = RunStatus::converged;
      break;
    }
  }

  res.x = s.x_curr;
  res.y = s.y_curr;
  if (s.avg_count > 0) {
    res.x_avg = s.xbar_sum / double(s.avg_count);
    res.y_avg = s.ybar_sum / double(s.avg_count);
  } else {
    res.x_avg = s.x_curr;
    res.y_avg = s.y_curr;
  }
  return res;
}

}  // namespace pdcp
