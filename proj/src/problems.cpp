#include "pdcp/problems.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "pdcp/io.hpp"

namespace pdcp {

namespace {

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

RecommendedParams interior_params(double op_norm) {
  double step = std::sqrt(0.9) / op_norm;
  return {step, step, 1.0};
}

}  // namespace

PrimalVec lasso_coordinate_descent(const Matrix& A, const Vec& b, double reg,
                                   int max_sweeps, double tol) {
  if (!(reg >= 0.0))
    throw ConfigError("lasso_coordinate_descent: reg must be nonnegative");
  if (A.rows() != b.size())
    throw ConfigError("lasso_coordinate_descent: A and b row counts differ");
  const int n = int(A.cols());
  PrimalVec x = PrimalVec::Zero(n);
  Vec r = b;  // residual b - A x, kept incrementally
  Vec colsq = A.colwise().squaredNorm();
  double biggest = kInf;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (sweep % 64 == 63) r = b - A * x;  // shed incremental drift
    biggest = 0.0;
    for (int i = 0; i < n; ++i) {
      if (colsq(i) == 0.0) continue;  // column never helps; keep x_i = 0
      double rho = A.col(i).dot(r) + colsq(i) * x(i);
      double xi = soft(rho, reg) / colsq(i);
      double d = xi - x(i);
      if (d != 0.0) {
        r -= A.col(i) * d;
        x(i) = xi;
      }
      biggest = std::max(biggest, std::abs(d));
    }
    if (biggest <= tol * (1.0 + x.cwiseAbs().maxCoeff())) return x;
  }
  throw ConvergenceError(
      "lasso_coordinate_descent: largest coordinate move still " +
          std::to_string(biggest) + " after " + std::to_string(max_sweeps) +
          " sweeps",
      biggest);
}

ProblemInstance bilinear_counterexample() {
  ProxFunction f = zero_function();
  ProxFunction gstar = zero_function();
  ProxFunction g = conjugate_of(zero_function());
  LinOp L = LinOp::scaled_identity(1, 1.0);

  SaddleRef ref;
  ref.x_star = PrimalVec::Zero(1);
  ref.y_star = DualVec::Zero(1);
  ref.provenance = SaddleProvenance::analytic;
  ref.kkt_residual = measure_kkt_residual(ref, f, gstar, L, 1000, 7);

  PrimalVec x0(1);
  x0 << 1.0;
  DualVec y0(1);
  y0 << 1.0;
  return ProblemInstance{"bilinear", f,  g, gstar, L, ref,
                         RecommendedParams{0.5, 0.5, 1.0}, x0, y0};
}

ProblemInstance lasso_toy(int m, int n, unsigned seed, double reg) {
  if (m < 1 || n < 1 || m > 50 || n > 50)
    throw ConfigError("lasso_toy: m and n must be in [1, 50]");
  if (!(reg >= 0.0)) throw ConfigError("lasso_toy: reg must be nonnegative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix A(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
  Vec b(m);
  for (int i = 0; i < m; ++i) b(i) = gauss(rng);

  PrimalVec xs = lasso_coordinate_descent(A, b, reg);
  DualVec ys = A * xs - b;  // the conjugate pairing puts the dual at Ax* - b

  ProxFunction f = l1_norm(reg);
  ProxFunction g = squared_l2(b, 1.0);
  ProxFunction gstar = conjugate_of(g);
  LinOp L = LinOp::from_matrix(A);

  SaddleRef ref{xs, ys, SaddleProvenance::oracle_run, 0.0};
  ref.kkt_residual = measure_kkt_residual(ref, f, gstar, L, 1000, 7);
  if (!(ref.kkt_residual <= 1e-9))
    throw ConvergenceError(
        "lasso_toy: packaged reference failed the sampled optimality check",
        ref.kkt_residual);

  return ProblemInstance{"lasso",
                         f,
                         g,
                         gstar,
                         L,
                         ref,
                         interior_params(L.norm_estimate()),
                         PrimalVec::Zero(n),
                         DualVec::Zero(m)};
}

LinOp grid_gradient(int width, int height) {
  if (width < 1 || height < 1)
    throw ConfigError("grid_gradient: width and height must be positive");
  const int n = width * height;
  auto fwd = [width, height, n](const Vec& u) {
    Vec out = Vec::Zero(2 * n);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        int p = r * width + c;
        if (c + 1 < width) out(p) = u(p + 1) - u(p);
        if (r + 1 < height) out(n + p) = u(p + width) - u(p);
      }
    return out;
  };
  auto adj = [width, height, n](const Vec& y) {
    Vec out = Vec::Zero(n);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        int p = r * width + c;
        if (c + 1 < width) {
          out(p + 1) += y(p);
          out(p) -= y(p);
        }
        if (r + 1 < height) {
          out(p + width) += y(n + p);
          out(p) -= y(n + p);
        }
      }
    return out;
  };
  LinOp op(n, 2 * n, fwd, adj, std::sqrt(8.0), false);
  if (n > 1) {
    double est = estimate_operator_norm(op, 1e-14, 200000, 0);
    op.set_norm_estimate(est, false);
  }
  return op;
}

Vec noisy_block_image(int width, int height, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec img(width * height);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      bool inside = r >= height / 4 && r < 3 * height / 4 && c >= width / 4 &&
                    c < 3 * width / 4;
      img(r * width + c) = (inside ? 1.0 : 0.0) + 0.1 * gauss(rng);
    }
  return img;
}

ProblemInstance tv_denoise_toy(int width, int height, unsigned noise_seed,
                               double reg) {
  if (width < 1 || height < 1 || width * height > 1024)
    throw ConfigError(
        "tv_denoise_toy: need width, height >= 1 and width*height <= 1024");
  if (width * height < 2)
    throw ConfigError("tv_denoise_toy: image needs at least two pixels");
  if (!(reg >= 0.0)) throw ConfigError("tv_denoise_toy: reg must be nonnegative");

  Vec data = noisy_block_image(width, height, noise_seed);
  LinOp L = grid_gradient(width, height);
  ProxFunction f = squared_l2(data, 1.0);
  ProxFunction g = l1_norm(reg);
  ProxFunction gstar = conjugate_of(g);

  return ProblemInstance{"tv",
                         f,
                         g,
                         gstar,
                         L,
                         std::nullopt,
                         interior_params(L.norm_estimate()),
                         data,
                         DualVec::Zero(L.out_dim())};
}

SaddleRef derive_saddle_ref(const ProblemInstance& problem, long budget,
                            bool force_bootstrap) {
  if (problem.analytic_saddle && !force_bootstrap)
    return *problem.analytic_saddle;
  return bootstrap_saddle(problem.f, problem.gstar, problem.L, problem.x0,
                          problem.y0, budget, 1e-9, 7, 1.0);
}

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + v + "' for key '" + key + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long d = std::stol(v, &used);
    if (used != v.size() || d != long(int(d))) throw std::invalid_argument(v);
    return int(d);
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + v + "' for key '" + key + "'");
  }
}

// Keys the command line consumes; a problem file may carry them alongside the
// problem keys, so instance loading skips them.
const std::set<std::string>& solver_keys() {
  static const std::set<std::string> keys = {
      "tau",  "sigma",   "theta", "max_iter", "tol",
      "stop_tol", "regime",  "out",   "certify",  "budget", "iters"};
  return keys;
}

struct KeyTracker {
  const KeyValues& kv;
  std::set<std::string> used;

  bool has(const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) return false;
    used.insert(key);
    return true;
  }
  std::string get(const std::string& key) {
    used.insert(key);
    return kv.at(key);
  }
  double num(const std::string& key, double fallback) {
    return has(key) ? parse_double(key, kv.at(key)) : fallback;
  }
  int integer(const std::string& key, int fallback) {
    return has(key) ? parse_int(key, kv.at(key)) : fallback;
  }
  void finish() {
    for (const auto& [key, value] : kv) {
      (void)value;
      if (key == "problem" || used.count(key) || solver_keys().count(key))
        continue;
      throw ConfigError("key '" + key + "' does not apply here");
    }
  }
};

ProxFunction build_catalog_function(const std::string& name,
                                    const std::string& prefix, KeyTracker& t,
                                    int dim) {
  auto tag = [&](const char* suffix) { return prefix + "_" + suffix; };
  if (name.rfind("conjugate_of:", 0) == 0)
    return conjugate_of(
        build_catalog_function(name.substr(13), prefix, t, dim));
  if (name == "zero") return zero_function();
  if (name == "l1") return l1_norm(t.num(tag("weight"), 1.0));
  if (name == "sq_l2") {
    Vec target = t.has(tag("target_csv"))
                     ? load_vector_csv(t.get(tag("target_csv")))
                     : Vec::Zero(dim);
    if (target.size() != dim)
      throw ConfigError(tag("target_csv") + " has length " +
                        std::to_string(target.size()) + ", expected " +
                        std::to_string(dim));
    return squared_l2(target, t.num(tag("weight"), 1.0));
  }
  if (name == "box") {
    if (!t.has(tag("lo")) || !t.has(tag("hi")))
      throw ConfigError("box function needs " + tag("lo") + " and " + tag("hi"));
    double lo = parse_double(tag("lo"), t.get(tag("lo")));
    double hi = parse_double(tag("hi"), t.get(tag("hi")));
    return box_indicator(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
  }
  throw ConfigError("unknown catalog function '" + name +
                    "' (expected zero | l1 | sq_l2 | box | conjugate_of:<name>)");
}

ProblemInstance load_custom(KeyTracker& t) {
  if (!t.has("L_csv"))
    throw ConfigError("problem=custom needs L_csv=<path>");
  Matrix A = load_matrix_csv(t.get("L_csv"));
  LinOp L = LinOp::from_matrix(A);
  if (!t.has("f") || !t.has("g"))
    throw ConfigError("problem=custom needs catalog names f= and g=");
  ProxFunction f = build_catalog_function(t.get("f"), "f", t, L.in_dim());
  ProxFunction g = build_catalog_function(t.get("g"), "g", t, L.out_dim());
  ProxFunction gstar = conjugate_of(g);

  std::optional<RecommendedParams> rec;
  if (L.norm_estimate() > 0.0) rec = interior_params(L.norm_estimate());
  return ProblemInstance{"custom",
                         f,
                         g,
                         gstar,
                         L,
                         std::nullopt,
                         rec,
                         PrimalVec::Zero(L.in_dim()),
                         DualVec::Zero(L.out_dim())};
}

}  // namespace

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

ProblemInstance load_problem(const KeyValues& kv) {
  KeyTracker t{kv, {}};
  std::string which = kv.count("problem") ? kv.at("problem") : "bilinear";

  ProblemInstance p = [&]() {
    if (which == "bilinear") return bilinear_counterexample();
    if (which == "lasso")
      return lasso_toy(t.integer("m", 5), t.integer("n", 5),
                       unsigned(t.integer("seed", 1)), t.num("reg", 0.1));
    if (which == "tv")
      return tv_denoise_toy(t.integer("width", 8), t.integer("height", 8),
                            unsigned(t.integer("seed", 2)), t.num("reg", 0.2));
    if (which == "custom") return load_custom(t);
    throw ConfigError("unknown problem '" + which +
                      "' (expected bilinear | lasso | tv | custom)");
  }();
  t.finish();
  return p;
}

ProblemInstance make_problem(const std::string& name) {
  return load_problem({{"problem", name}});
}

}  // namespace pdcp
