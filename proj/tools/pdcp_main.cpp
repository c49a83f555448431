#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdcp/certificates.hpp"
#include "pdcp/io.hpp"
#include "pdcp/problems.hpp"
#include "pdcp/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace pdcp;

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

double parse_num(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + v + "' for key '" + key + "'");
  }
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long d = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + v + "' for key '" + key + "'");
  }
}

RegimeCheck parse_policy(const std::string& s) {
  if (s == "strict") return RegimeCheck::strict;
  if (s == "boundary_ok") return RegimeCheck::boundary_ok;
  if (s == "off") return RegimeCheck::off;
  throw ConfigError("unknown regime policy '" + s +
                    "' (expected strict | boundary_ok | off)");
}

const char* policy_name(RegimeCheck c) {
  switch (c) {
    case RegimeCheck::strict: return "strict";
    case RegimeCheck::boundary_ok: return "boundary_ok";
    case RegimeCheck::off: return "off";
  }
  return "?";
}

ordered_json json_num(double v) {
  if (std::isfinite(v)) return v;
  return "diverged";
}

// Flags that the user did not pass fall back to the config file, then to the
// caller's default (flag-wins precedence).
struct Settings {
  CLI::App* cmd;
  KeyValues kv;

  double num(const char* flag, const char* key, double fallback) {
    if (cmd->count(flag)) return cmd->get_option(flag)->as<double>();
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_num(key, it->second);
  }
  long integer(const char* flag, const char* key, long fallback) {
    if (cmd->count(flag)) return cmd->get_option(flag)->as<long>();
    auto it = kv.find(key);
    return it == kv.end() ? fallback : parse_long(key, it->second);
  }
  std::string str(const char* flag, const char* key, std::string fallback) {
    if (cmd->count(flag)) return cmd->get_option(flag)->as<std::string>();
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }
};

Settings settings_for(CLI::App* cmd, const std::string& config_path,
                      const std::string& problem_flag_value) {
  KeyValues kv;
  if (!config_path.empty()) kv = parse_config_file(config_path);
  if (cmd->count("--problem")) kv["problem"] = problem_flag_value;
  return Settings{cmd, std::move(kv)};
}

fs::path resolve_out_dir(const std::string& from_flags) {
  std::string dir = from_flags;
  if (dir.empty()) {
    const char* env = std::getenv("PDCP_OUT_DIR");
    dir = env && *env ? env : ".";
  }
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

SolverConfig build_config(const ProblemInstance& p, double tau, double sigma,
                          double theta, long max_iter, double tol,
                          const std::string& regime) {
  if (std::isnan(tau) || std::isnan(sigma) || std::isnan(theta)) {
    if (!p.recommended)
      throw ConfigError("problem '" + p.name +
                        "' has no recommended step sizes; pass --tau, --sigma "
                        "and --theta");
    if (std::isnan(tau)) tau = p.recommended->tau;
    if (std::isnan(sigma)) sigma = p.recommended->sigma;
    if (std::isnan(theta)) theta = p.recommended->theta;
  }
  SolverConfig cfg;
  cfg.tau = tau;
  cfg.sigma = sigma;
  cfg.theta = theta;
  cfg.max_iter = max_iter;
  cfg.stop_tol = tol;
  cfg.op_norm = p.L.norm_estimate();
  cfg.regime_check = parse_policy(regime);
  return cfg;
}

ordered_json config_echo(const ProblemInstance& p, const SolverConfig& cfg,
                         const RegimeReport& rep) {
  return ordered_json{
      {"problem", p.name},
      {"tau", cfg.tau},
      {"sigma", cfg.sigma},
      {"theta", cfg.theta},
      {"max_iter", cfg.max_iter},
      {"stop_tol", cfg.stop_tol},
      {"regime_policy", policy_name(cfg.regime_check)},
      {"op_norm", cfg.op_norm},
      {"regime",
       {{"classification", to_string(rep.regime)},
        {"product", rep.product},
        {"bound", rep.bound}}},
  };
}

ordered_json run_json(const RunResult& r) {
  ordered_json j{
      {"verdict", to_string(r.status)},
      {"iterations", r.iterations},
      {"final_dx", json_num(r.final_dx)},
      {"final_dy", json_num(r.final_dy)},
  };
  if (r.status == RunStatus::diverged) {
    j["diverged_at"] = r.diverged_at;
    j["diverged_norm"] = json_num(r.diverged_norm);
  }
  return j;
}

ordered_json summary_json(const CertificateSummary& s, bool boundary) {
  ordered_json j{
      {"V0", s.V0},
      {"min_F", s.min_F},
      {"min_G", s.min_G},
      {"min_V", s.min_V},
      {"min_gap", s.min_gap},
      {"max_lyapunov_residual", s.max_lyap_residual},
      {"max_gap_identity_error", s.max_gap_identity_error},
      {"max_interpolation_residual", s.max_interp_residual},
      {"telescope_margin", s.telescope_margin},
      {"ergodic_envelope_margin", s.ergodic_margin},
      {"certified_iterations", s.records},
      {"violations", s.violations.size()},
  };
  if (boundary) {
    j["boundary_sum_sq"] = s.boundary_sum_sq;
    j["boundary_budget"] = s.boundary_budget;
    j["boundary_margin"] = s.boundary_margin;
    j["final_lag2"] = s.final_lag2;
  }
  if (!s.violations.empty()) {
    const Violation& v = s.violations.front();
    j["first_violation"] = {
        {"k", v.k}, {"kind", v.kind}, {"value", v.value}, {"tol", v.tol}};
  }
  return j;
}

void write_report(const fs::path& path, const ordered_json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
  std::cout << j.dump(2) << "\n";
}

void report_violations(const CertificateSummary& s) {
  if (s.violations.empty()) return;
  const Violation& v = s.violations.front();
  std::cerr << "certificate violation at iteration " << v.k << ": " << v.kind
            << " = " << format_double(v.value) << " (tolerance "
            << format_double(v.tol) << "); " << s.violations.size()
            << " violation(s) total\n";
}

void write_trace_csv(const fs::path& path, const RunResult& r,
                     const std::vector<CertificateRecord>* recs) {
  std::ofstream out(path);
  out << "k,dx,dy,lag2";
  if (recs) out << ",F,G,gap,V,lyapunov_residual";
  out << "\n";
  for (size_t i = 0; i < r.trace.size(); ++i) {
    const TraceRow& t = r.trace[i];
    out << t.k << "," << format_double(t.dx) << "," << format_double(t.dy)
        << "," << format_double(t.lag2);
    if (recs) {
      double nan = std::numeric_limits<double>::quiet_NaN();
      bool have = i < recs->size();
      const CertificateRecord* c = have ? &(*recs)[i] : nullptr;
      out << "," << format_double(c ? c->F : nan) << ","
          << format_double(c ? c->G : nan) << ","
          << format_double(c ? c->gap : nan) << ","
          << format_double(c ? c->V : nan) << ","
          << format_double(c ? c->lyap_residual : nan);
    }
    out << "\n";
  }
}

void write_records_csv(const fs::path& path,
                       const std::vector<CertificateRecord>& recs) {
  std::ofstream out(path);
  out << "k,F,G,gap,V,lyap_lhs,rhs_dual,rhs_xcombo,rhs_xdamp,lyap_residual,"
         "coeff_pos,coeff_nonneg,interp_g,interp_f,interp_fdiff,"
         "interp_fdiff_rev,boundary_residual,lag2_sq\n";
  for (const CertificateRecord& c : recs) {
    out << c.k;
    for (double v : {c.F, c.G, c.gap, c.V, c.lyap_lhs, c.rhs_dual,
                     c.rhs_xcombo, c.rhs_xdamp, c.lyap_residual, c.coeff_pos,
                     c.coeff_nonneg, c.interp_g, c.interp_f, c.interp_fdiff,
                     c.interp_fdiff_rev, c.boundary_residual, c.lag2_sq})
      out << "," << format_double(v);
    out << "\n";
  }
}

void write_boundary_csv(const fs::path& path,
                        const std::vector<CertificateRecord>& recs) {
  std::ofstream out(path);
  out << "k,lag2,partial_sum_sq\n";
  double sum = 0.0;
  for (const CertificateRecord& c : recs) {
    sum += c.lag2_sq;
    out << c.k << "," << format_double(std::sqrt(c.lag2_sq)) << ","
        << format_double(sum) << "\n";
  }
}

void write_tightness_csv(const fs::path& path,
                         const std::vector<TightnessRow>& rows) {
  std::ofstream out(path);
  out << "theta,tau_sigma,lambda1_re,lambda1_im,lambda2_re,lambda2_im,radius,"
         "verdict_analytic,verdict_empirical\n";
  for (const TightnessRow& r : rows) {
    out << format_double(r.theta) << "," << format_double(r.tau_sigma) << ","
        << format_double(r.lambda1.real()) << ","
        << format_double(r.lambda1.imag()) << ","
        << format_double(r.lambda2.real()) << ","
        << format_double(r.lambda2.imag()) << "," << format_double(r.radius)
        << "," << to_string(r.analytic) << "," << to_string(r.empirical)
        << "\n";
  }
}

int exit_for(const RunResult& r, const CertificateSummary* s) {
  if (r.status == RunStatus::diverged) return 2;
  if (s && !s->violations.empty()) return 3;
  return 0;
}

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string problem = "bilinear";
  std::string config, out;
  std::string regime = "boundary_ok";
  double tau = kUnset, sigma = kUnset, theta = kUnset, tol = 1e-10;
  long max_iter = 100000, budget = 1000000;
  bool certify = false;
};

int cmd_solve(CLI::App* cmd, SolveArgs& a) {
  Settings s = settings_for(cmd, a.config, a.problem);
  ProblemInstance p = load_problem(s.kv);
  double tol = s.num("--tol", "tol", s.num("--tol", "stop_tol", a.tol));
  SolverConfig cfg = build_config(
      p, s.num("--tau", "tau", a.tau), s.num("--sigma", "sigma", a.sigma),
      s.num("--theta", "theta", a.theta),
      s.integer("--max-iter", "max_iter", a.max_iter), tol,
      s.str("--regime", "regime", "boundary_ok"));
  RegimeReport rep = validate_config(cfg);
  fs::path dir = resolve_out_dir(s.str("--out", "out", a.out));

  RunOptions ro;
  ro.x0 = p.x0;
  ro.y0 = p.y0;

  ordered_json report;
  report["config"] = config_echo(p, cfg, rep);
  fs::path trace_path = dir / "solve_trace.csv";
  fs::path report_path = dir / "solve_report.json";
  int code = 0;

  if (a.certify) {
    SaddleRef ref = derive_saddle_ref(p, a.budget);
    CertifiedRun cr = certified_run(p.f, p.gstar, p.L, cfg, ref, {}, ro);
    write_trace_csv(trace_path, cr.result, &cr.records);
    report["run"] = run_json(cr.result);
    report["certificates"] = summary_json(cr.summary, false);
    report["paths"] = {{"trace_csv", trace_path.string()},
                       {"report_json", report_path.string()}};
    report_violations(cr.summary);
    code = exit_for(cr.result, &cr.summary);
  } else {
    RunResult r = run(p.f, p.gstar, p.L, cfg, ro);
    write_trace_csv(trace_path, r, nullptr);
    report["run"] = run_json(r);
    report["paths"] = {{"trace_csv", trace_path.string()},
                       {"report_json", report_path.string()}};
    code = exit_for(r, nullptr);
  }
  write_report(report_path, report);
  return code;
}

// ---- certify --------------------------------------------------------------

struct CertifyArgs {
  std::string problem = "bilinear";
  std::string config, out;
  std::string regime = "boundary_ok";
  double tau = kUnset, sigma = kUnset, theta = kUnset, tol = 1e-10;
  long max_iter = 100000, budget = 1000000;
  bool corrupt = false;
};

int cmd_certify(CLI::App* cmd, CertifyArgs& a) {
  Settings s = settings_for(cmd, a.config, a.problem);
  ProblemInstance p = load_problem(s.kv);
  double tol = s.num("--tol", "tol", s.num("--tol", "stop_tol", a.tol));
  SolverConfig cfg = build_config(
      p, s.num("--tau", "tau", a.tau), s.num("--sigma", "sigma", a.sigma),
      s.num("--theta", "theta", a.theta),
      s.integer("--max-iter", "max_iter", a.max_iter), tol,
      s.str("--regime", "regime", "boundary_ok"));
  RegimeReport rep = validate_config(cfg);
  fs::path dir = resolve_out_dir(s.str("--out", "out", a.out));

  SaddleRef ref = derive_saddle_ref(p, a.budget);
  EngineOptions opts;
  opts.corrupt_F_sign = a.corrupt;
  RunOptions ro;
  ro.x0 = p.x0;
  ro.y0 = p.y0;
  CertifiedRun cr = certified_run(p.f, p.gstar, p.L, cfg, ref, opts, ro);

  fs::path records_path = dir / "certify_records.csv";
  fs::path report_path = dir / "certify_report.json";
  write_records_csv(records_path, cr.records);

  ordered_json report;
  report["config"] = config_echo(p, cfg, rep);
  report["run"] = run_json(cr.result);
  report["certificates"] = summary_json(cr.summary, false);
  report["reference"] = {
      {"provenance", ref.provenance == SaddleProvenance::analytic
                         ? "analytic"
                         : "oracle_run"},
      {"kkt_residual", ref.kkt_residual}};
  report["paths"] = {{"records_csv", records_path.string()},
                     {"report_json", report_path.string()}};
  write_report(report_path, report);
  report_violations(cr.summary);
  return exit_for(cr.result, &cr.summary);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string problem = "bilinear";
  std::string config, out;
  double theta_min = 0.5, theta_max = 2.0;
  double product_min = 0.0, product_max = 2.0;
  long theta_count = 21, product_count = 21;
  long iters = 10000;
};

// The product grid excludes its lower endpoint (tau sigma = 0 is no step at
// all): count points over (min, max].
std::vector<double> product_grid(double lo, double hi, long count) {
  if (count < 1 || !(hi > lo))
    throw ConfigError("sweep: need product-max > product-min and count >= 1");
  std::vector<double> out(count);
  for (long i = 1; i <= count; ++i)
    out[i - 1] = lo + (hi - lo) * double(i) / double(count);
  return out;
}

struct EmpiricalRow {
  double theta, ts;
  RunStatus status;
  long iterations;
  double dx, dy;
};

std::vector<EmpiricalRow> problem_sweep(const ProblemInstance& p,
                                        const std::vector<double>& thetas,
                                        const std::vector<double>& products,
                                        long iters) {
  std::vector<EmpiricalRow> rows(thetas.size() * products.size());
  const double N = p.L.norm_estimate();
  auto work = [&](size_t begin, size_t end) {
    for (size_t idx = begin; idx < end; ++idx) {
      double theta = thetas[idx / products.size()];
      double ts = products[idx % products.size()];
      SolverConfig cfg;
      cfg.theta = theta;
      cfg.tau = cfg.sigma = std::sqrt(ts) / N;
      cfg.op_norm = N;
      cfg.max_iter = iters;
      cfg.stop_tol = 1e-10;
      cfg.regime_check = RegimeCheck::off;
      RunOptions ro;
      ro.x0 = p.x0;
      ro.y0 = p.y0;
      ro.keep_trace = false;
      RunResult r = run(p.f, p.gstar, p.L, cfg, ro);
      rows[idx] = {theta, ts, r.status, r.iterations, r.final_dx, r.final_dy};
    }
  };
  size_t total = rows.size();
  int workers = int(std::min<size_t>(
      std::max(1u, std::thread::hardware_concurrency()), 8));
  std::vector<std::thread> pool;
  size_t chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    size_t b = w * chunk, e = std::min(total, b + chunk);
    if (b >= e) break;
    pool.emplace_back(work, b, e);
  }
  for (auto& t : pool) t.join();
  return rows;
}

int cmd_sweep(CLI::App* cmd, SweepArgs& a) {
  Settings s = settings_for(cmd, a.config, a.problem);
  ProblemInstance p = load_problem(s.kv);
  long iters = s.integer("--iters", "iters", a.iters);
  std::vector<double> thetas =
      linspace(a.theta_min, a.theta_max, int(a.theta_count));
  std::vector<double> products =
      product_grid(a.product_min, a.product_max, a.product_count);
  fs::path dir = resolve_out_dir(s.str("--out", "out", a.out));
  fs::path report_path = dir / "sweep_report.json";

  ordered_json report;
  report["grid"] = {{"theta_min", a.theta_min},
                    {"theta_max", a.theta_max},
                    {"theta_count", a.theta_count},
                    {"product_min", a.product_min},
                    {"product_max", a.product_max},
                    {"product_count", a.product_count},
                    {"iters", iters},
                    {"rows", thetas.size() * products.size()}};
  report["problem"] = p.name;

  if (p.name == "bilinear") {
    std::vector<TightnessRow> rows = tightness_map(thetas, products, iters);
    fs::path csv = dir / "tightness_map.csv";
    write_tightness_csv(csv, rows);
    long mismatches = 0, divergent = 0, convergent = 0, boundary = 0;
    for (const TightnessRow& r : rows) {
      if (r.analytic != r.empirical) ++mismatches;
      if (r.empirical == SpectralVerdict::divergent) ++divergent;
      if (r.empirical == SpectralVerdict::convergent) ++convergent;
      if (r.empirical == SpectralVerdict::boundary_oscillatory) ++boundary;
    }
    report["verdicts"] = {{"convergent", convergent},
                          {"divergent", divergent},
                          {"boundary_oscillatory", boundary},
                          {"analytic_empirical_mismatches", mismatches}};
    report["paths"] = {{"map_csv", csv.string()},
                       {"report_json", report_path.string()}};
  } else {
    std::vector<EmpiricalRow> rows = problem_sweep(p, thetas, products, iters);
    fs::path csv = dir / "sweep_empirical.csv";
    std::ofstream out(csv);
    out << "theta,tau_sigma,verdict_empirical,iterations,final_dx,final_dy\n";
    long divergent = 0, convergent = 0, nosettle = 0;
    for (const EmpiricalRow& r : rows) {
      const char* verdict = r.status == RunStatus::diverged     ? "divergent"
                            : r.status == RunStatus::converged ? "convergent"
                                                               : "no_settle";
      (r.status == RunStatus::diverged
           ? divergent
           : r.status == RunStatus::converged ? convergent : nosettle)++;
      out << format_double(r.theta) << "," << format_double(r.ts) << ","
          << verdict << "," << r.iterations << "," << format_double(r.dx)
          << "," << format_double(r.dy) << "\n";
    }
    report["verdicts"] = {{"convergent", convergent},
                          {"divergent", divergent},
                          {"no_settle", nosettle}};
    report["paths"] = {{"map_csv", csv.string()},
                       {"report_json", report_path.string()}};
  }
  write_report(report_path, report);
  return 0;
}

// ---- boundary -------------------------------------------------------------

struct BoundaryArgs {
  std::string problem = "bilinear";
  std::string config, out;
  double theta = 1.0;
  long iters = 10000, budget = 1000000;
};

int cmd_boundary(CLI::App* cmd, BoundaryArgs& a) {
  Settings s = settings_for(cmd, a.config, a.problem);
  ProblemInstance p = load_problem(s.kv);
  double theta = s.num("--theta", "theta", a.theta);
  long iters = s.integer("--iters", "iters", a.iters);
  if (!(theta > 0.5))
    throw ConfigError(
        "boundary experiments need theta > 1/2: the damping coefficient "
        "(2 theta - 1)/(4 tau (1 + 2 theta)) vanishes at theta = 1/2");

  const double N = p.L.norm_estimate();
  SolverConfig cfg;
  cfg.theta = theta;
  cfg.tau = cfg.sigma = 2.0 / (std::sqrt(1.0 + 2.0 * theta) * N);
  cfg.op_norm = N;
  cfg.max_iter = iters;
  cfg.stop_tol = 0.0;  // map the full series
  cfg.regime_check = RegimeCheck::boundary_ok;
  RegimeReport rep = validate_config(cfg);
  fs::path dir = resolve_out_dir(s.str("--out", "out", a.out));

  SaddleRef ref = derive_saddle_ref(p, a.budget);
  EngineOptions opts;
  opts.boundary = true;
  RunOptions ro;
  ro.x0 = p.x0;
  ro.y0 = p.y0;
  CertifiedRun cr = certified_run(p.f, p.gstar, p.L, cfg, ref, opts, ro);

  fs::path series_path = dir / "boundary_series.csv";
  fs::path report_path = dir / "boundary_report.json";
  write_boundary_csv(series_path, cr.records);

  ordered_json report;
  report["config"] = config_echo(p, cfg, rep);
  report["run"] = run_json(cr.result);
  report["certificates"] = summary_json(cr.summary, true);
  report["paths"] = {{"series_csv", series_path.string()},
                     {"report_json", report_path.string()}};
  write_report(report_path, report);
  report_violations(cr.summary);
  return exit_for(cr.result, &cr.summary);
}

void add_common_run_flags(CLI::App* cmd, std::string& problem,
                          std::string& config, std::string& out, double& tau,
                          double& sigma, double& theta, double& tol,
                          long& max_iter) {
  cmd->add_option("--problem", problem,
                  "instance: bilinear | lasso | tv | custom");
  cmd->add_option("--config", config, "key=value file; flags win on overlap");
  cmd->add_option("--out", out, "output directory (default $PDCP_OUT_DIR or .)");
  cmd->add_option("--tau", tau, "primal step size");
  cmd->add_option("--sigma", sigma, "dual step size");
  cmd->add_option("--theta", theta, "extrapolation parameter");
  cmd->add_option("--tol", tol, "relative stopping tolerance (0 disables)");
  cmd->add_option("--max-iter", max_iter, "iteration budget");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Primal-dual splitting runs with spectral analysis and per-iteration "
      "convergence certificates"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand(
      "solve", "run one instance, write trace CSV and report JSON");
  add_common_run_flags(solve, solve_args.problem, solve_args.config,
                       solve_args.out, solve_args.tau, solve_args.sigma,
                       solve_args.theta, solve_args.tol, solve_args.max_iter);
  solve->add_option("--regime", solve_args.regime,
                    "step-size policy: strict | boundary_ok | off");
  solve->add_flag("--certify", solve_args.certify,
                  "evaluate convergence certificates along the run");
  solve->add_option("--budget", solve_args.budget,
                    "iteration budget for deriving a reference saddle");

  CertifyArgs certify_args;
  CLI::App* certify = app.add_subcommand(
      "certify", "certificate-instrumented run, full record CSV plus summary");
  add_common_run_flags(certify, certify_args.problem, certify_args.config,
                       certify_args.out, certify_args.tau, certify_args.sigma,
                       certify_args.theta, certify_args.tol,
                       certify_args.max_iter);
  certify->add_option("--regime", certify_args.regime,
                      "step-size policy: strict | boundary_ok | off");
  certify->add_option("--budget", certify_args.budget,
                      "iteration budget for deriving a reference saddle");
  certify
      ->add_flag("--corrupt-certificates", certify_args.corrupt,
                 "negative control: feed the sign-flipped primal gap into "
                 "every check")
      ->group("");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid over (theta, tau sigma): spectral map plus empirical "
               "verdicts");
  sweep->add_option("--problem", sweep_args.problem,
                    "instance: bilinear | lasso | tv | custom");
  sweep->add_option("--config", sweep_args.config,
                    "key=value file; flags win on overlap");
  sweep->add_option("--out", sweep_args.out,
                    "output directory (default $PDCP_OUT_DIR or .)");
  sweep->add_option("--theta-min", sweep_args.theta_min, "grid start");
  sweep->add_option("--theta-max", sweep_args.theta_max, "grid end");
  sweep->add_option("--theta-count", sweep_args.theta_count, "grid points");
  sweep->add_option("--product-min", sweep_args.product_min,
                    "tau sigma grid start (excluded)");
  sweep->add_option("--product-max", sweep_args.product_max,
                    "tau sigma grid end (included)");
  sweep->add_option("--product-count", sweep_args.product_count,
                    "tau sigma grid points");
  sweep->add_option("--iters", sweep_args.iters,
                    "iterations per empirical verdict");

  BoundaryArgs boundary_args;
  CLI::App* boundary = app.add_subcommand(
      "boundary", "run exactly on the step-size boundary and check the "
                  "second-difference summability bound");
  boundary->add_option("--problem", boundary_args.problem,
                       "instance: bilinear | lasso | tv | custom");
  boundary->add_option("--config", boundary_args.config,
                       "key=value file; flags win on overlap");
  boundary->add_option("--out", boundary_args.out,
                       "output directory (default $PDCP_OUT_DIR or .)");
  boundary->add_option("--theta", boundary_args.theta,
                       "extrapolation parameter, must be > 1/2");
  boundary->add_option("--iters", boundary_args.iters, "iterations to map");
  boundary->add_option("--budget", boundary_args.budget,
                       "iteration budget for deriving a reference saddle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve, solve_args);
    if (certify->parsed()) return cmd_certify(certify, certify_args);
    if (sweep->parsed()) return cmd_sweep(sweep, sweep_args);
    if (boundary->parsed()) return cmd_boundary(boundary, boundary_args);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json err{{"error", e.what()}};
    std::cout << err.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
