#pragma once

#include <optional>
#include <vector>

#include "pdcp/linop.hpp"
#include "pdcp/prox.hpp"

namespace pdcp {

enum class RegimeCheck { strict, boundary_ok, off };
enum class Regime { interior, boundary, violated, theta_below_half };

struct SolverConfig {
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 1.0;
  long max_iter = 100000;
  double op_norm = 0.0;  // ||L|| used for the admissibility product
  RegimeCheck regime_check = RegimeCheck::boundary_ok;
  double stop_tol = 1e-10;  // 0 disables the stopping rule
};

struct RegimeReport {
  Regime regime;
  double product;  // tau * sigma * op_norm^2
  double bound;    // 4 / (1 + 2 theta)
  std::string message;
};

// Classifies the step sizes against theta >= 1/2 and
// tau sigma ||L||^2 <= 4 / (1 + 2 theta), then enforces the policy:
// strict wants both inequalities strict, boundary_ok admits exactly one
// equality (the doubly tight corner stays inadmissible), off never throws.
RegimeReport validate_config(const SolverConfig& cfg);

const char* to_string(Regime r);

// One primal-dual state. x_prev/x_curr and y_prev/y_curr are the last two
// iterates of each sequence; Lx_* cache the operator images so each step
// applies L and L* exactly once.
struct IterState {
  long k = 0;
  PrimalVec x_prev, x_curr;
  DualVec y_prev, y_curr;
  DualVec Lx_prev, Lx_curr;
  PrimalVec xbar_sum;
  DualVec ybar_sum;
  long avg_count = 0;  // averages run over x_1 .. x_K
};

IterState init_state(const LinOp& L, PrimalVec x0, DualVec y0);

//   x_{k+1} = prox_{tau f}(x_k - tau L* y_k)
//   y_{k+1} = prox_{sigma g*}(y_k + sigma L(x_{k+1} + theta (x_{k+1} - x_k)))
// with the extrapolated argument assembled from cached operator images.
IterState cp_step(const IterState& s, const SolverConfig& cfg,
                  const ProxFunction& f, const ProxFunction& gstar,
                  const LinOp& L);

enum class RunStatus { converged, max_iter_reached, diverged };

const char* to_string(RunStatus s);

/// View of one completed step handed to observers: iterates k and k+1 of both
// sequences plus the cached operator images.
struct StepWindow {
  long k;
  const PrimalVec& x_k;
  const PrimalVec& x_k1;
  const DualVec& y_k;
  const DualVec& y_k1;
  const DualVec& Lx_k;
  const DualVec& Lx_k1;
  double dx, dy;
};

using StepObserver = std::function<void(const StepWindow&)>;

struct TraceRow {
  long k;
  double dx;    // ||x_{k+1} - x_k||
  double dy;    // ||y_{k+1} - y_k||
  double lag2;  // ||x_{k+1} - x_{k-1}||, 0 at k = 0
};

struct RunResult {
  RunStatus status;
  long iterations;
  PrimalVec x;
  DualVec y;
  PrimalVec x_avg;  // ergodic averages over x_1 .. x_K
  DualVec y_avg;
  double final_dx, final_dy;
  long diverged_at = -1;
  double diverged_norm = 0.0;
  std::vector<TraceRow> trace;
};

struct RunOptions {
  std::optional<PrimalVec> x0;  // default: zero start
  std::optional<DualVec> y0;
  bool keep_trace = true;
  StepObserver observer;  // called after each step; skipped on a diverged step
};

// Iterate norms past this declare divergence.
constexpr double kDivergenceNorm = 1e12;

RunResult run(const ProxFunction& f, const ProxFunction& gstar, const LinOp& L,
              const SolverConfig& cfg, const RunOptions& opts = {});

}  // namespace pdcp
