#include "pdcp/spectral.hpp"

#include <cmath>
#include <thread>

#include "pdcp/solver.hpp"

namespace pdcp {

namespace {

// Verdict thresholds on the spectral radius.
constexpr double kRadiusTol = 1e-12;

void require_params(double tau, double sigma, double theta) {
  if (!(tau > 0.0) || !(sigma > 0.0))
    throw ConfigError("bilinear model: tau and sigma must be positive");
  if (!std::isfinite(theta)) throw ConfigError("bilinear model: theta must be finite");
}

}  // namespace

const char* to_string(SpectralVerdict v) {
  switch (v) {
    case SpectralVerdict::convergent: return "convergent";
    case SpectralVerdict::boundary_oscillatory: return "boundary_oscillatory";
    case SpectralVerdict::divergent: return "divergent";
  }
  return "?";
}

Eigen::Matrix2d iteration_matrix(double tau, double sigma, double theta) {
  require_params(tau, sigma, theta);
  Eigen::Matrix2d M;
  M << 1.0, -tau, sigma, 1.0 - tau * sigma * (1.0 + theta);
  return M;
}

std::pair<std::complex<double>, std::complex<double>> bilinear_eigenvalues(
    double tau, double sigma, double theta) {
  require_params(tau, sigma, theta);
  double ts = tau * sigma;
  double p = ts * (1.0 + theta);
  double radicand = ts * (ts * (1.0 + theta) * (1.0 + theta) - 4.0);
  std::complex<double> root =
      radicand >= 0.0 ? std::complex<double>(std::sqrt(radicand), 0.0)
                      : std::complex<double>(0.0, std::sqrt(-radicand));
  std::complex<double> l1 = 0.5 * (std::complex<double>(2.0 - p, 0.0) + root);
  std::complex<double> l2 = 0.5 * (std::complex<double>(2.0 - p, 0.0) - root);
  return {l1, l2};
}

RegimeClassification classify_bilinear(double tau, double sigma, double theta) {
  auto [l1, l2] = bilinear_eigenvalues(tau, sigma, theta);
  RegimeClassification c;
  c.lambda1 = l1;
  c.lambda2 = l2;
  c.spectral_radius = std::max(std::abs(l1), std::abs(l2));
  if (c.spectral_radius < 1.0 - kRadiusTol)
    c.verdict = SpectralVerdict::convergent;
  else if (c.spectral_radius <= 1.0 + kRadiusTol)
    c.verdict = SpectralVerdict::boundary_oscillatory;
  else
    c.verdict = SpectralVerdict::divergent;

  // At or beyond the step-size edge both eigenvalues are real, the smaller
  // one is at or below -1 and the larger stays inside (-1, 1). This is a
  // structural fact of the closed form; failing it means the formulas above
  // are wrong, not the caller.
  double ts = tau * sigma;
  if (theta >= 0.5 && ts * (1.0 + 2.0 * theta) >= 4.0) {
    bool ok = l2.imag() == 0.0 && l2.real() <= -1.0 + 1e-9 &&
              l2.real() < l1.real() && l1.real() < 1.0;
    if (!ok)
      throw std::logic_error("classify_bilinear: eigenvalue structure violated");
  }
  return c;
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 1) throw ConfigError("linspace: count must be >= 1");
  std::vector<double> v(count);
  if (count == 1) {
    v[0] = hi;
    return v;
  }
  double step = (hi - lo) / double(count - 1);
  for (int i = 0; i < count; ++i) v[i] = lo + double(i) * step;
  v[count - 1] = hi;
  return v;
}

namespace {

SpectralVerdict empirical_verdict(double theta, double ts, long iters) {
  double s = std::sqrt(ts);
  SolverConfig cfg;
  cfg.tau = s;
  cfg.sigma = s;
  cfg.theta = theta;
  cfg.max_iter = iters;
  cfg.op_norm = 1.0;
  cfg.regime_check = RegimeCheck::off;
  cfg.stop_tol = 1e-10;

  ProxFunction zero = zero_function();
  LinOp id = LinOp::scaled_identity(1, 1.0);
  RunOptions opts;
  opts.x0 = PrimalVec::Constant(1, 1.0);
  opts.y0 = DualVec::Constant(1, 1.0);
  opts.keep_trace = false;
  RunResult r = run(zero, zero, id, cfg, opts);

  if (r.status == RunStatus::diverged) return SpectralVerdict::divergent;
  double zn = std::hypot(r.x(0), r.y(0));
  if (zn <= 1e-6) return SpectralVerdict::convergent;
  return SpectralVerdict::boundary_oscillatory;
}

}  // namespace

std::vector<TightnessRow> tightness_map(const std::vector<double>& thetas,
                                        const std::vector<double>& products,
                                        long empirical_iters, int workers) {
  for (double ts : products)
    if (!(ts > 0.0)) throw ConfigError("tightness_map: products must be positive");
  if (empirical_iters < 1)
    throw ConfigError("tightness_map: empirical_iters must be >= 1");

  const size_t n = thetas.size() * products.size();
  std::vector<TightnessRow> rows(n);
  auto fill = [&](size_t begin, size_t end) {
    for (size_t idx = begin; idx < end; ++idx) {
      double theta = thetas[idx / products.size()];
      double ts = products[idx % products.size()];
      double s = std::sqrt(ts);
      RegimeClassification c = classify_bilinear(s, s, theta);
      rows[idx] = {theta,     ts,
                   c.lambda1, c.lambda2,
                   c.spectral_radius, c.verdict,
                   empirical_verdict(theta, ts, empirical_iters)};
    }
  };

  int nw = workers > 0 ? workers
                       : std::min(8u, std::max(1u, std::thread::hardware_concurrency()));
  if (nw <= 1 || n < 2) {
    fill(0, n);
    return rows;
  }
  std::vector<std::thread> pool;
  size_t chunk = (n + nw - 1) / nw;
  for (int w = 0; w < nw; ++w) {
    size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back(fill, b, e);
  }
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace pdcp
