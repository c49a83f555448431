#pragma once

#include <map>
#include <optional>
#include <string>

#include "pdcp/certificates.hpp"

namespace pdcp {

struct RecommendedParams {
  double tau, sigma, theta;
};

// A bundled saddle-point instance: minimize f(x) + g(Lx). The iteration works
// with the conjugate of g, carried here alongside the primal form.
struct ProblemInstance {
  std::string name;
  ProxFunction f;
  ProxFunction g;
  ProxFunction gstar;
  LinOp L;
  std::optional<SaddleRef> analytic_saddle;  // measured residual <= 1e-9
  std::optional<RecommendedParams> recommended;
  PrimalVec x0;
  DualVec y0;
};

// One-dimensional pure coupling term: f and the conjugate of g both vanish,
// L is the scalar identity, and the unique saddle is the origin. Starts at
// (1, 1) so step-size experiments see a nontrivial orbit.
ProblemInstance bilinear_counterexample();

// minimize reg*||x||_1 + 0.5*||Ax - b||^2 with a seeded Gaussian matrix and
// target. The packaged reference is an independent coordinate-descent solve
// with dual y* = A x* - b. Desk scale: m, n <= 50.
ProblemInstance lasso_toy(int m = 5, int n = 5, unsigned seed = 1,
                          double reg = 0.1);

// minimize 0.5*||u - data||^2 + reg*||D u||_1 with D the forward-difference
// gradient of a width x height image (matrix-free). data is a seeded noisy
// block image. No packaged reference; derive_saddle_ref bootstraps one.
// Desk scale: width*height <= 1024.
ProblemInstance tv_denoise_toy(int width = 8, int height = 8,
                               unsigned noise_seed = 2, double reg = 0.2);

// Cyclic coordinate descent on the composite objective above, run until the
// largest coordinate move in a sweep drops below tol*(1 + ||x||_inf). Serves
// as the reference oracle for lasso_toy.
PrimalVec lasso_coordinate_descent(const Matrix& A, const Vec& b, double reg,
                                   int max_sweeps = 200000, double tol = 1e-14);

// Forward differences on a width x height grid, horizontal block stacked on
// vertical, zero rows at the far edges. The returned operator carries a
// power-iterated norm estimate (the exact value is below sqrt(8)).
LinOp grid_gradient(int width, int height);

// The seeded noisy block image used by tv_denoise_toy, row-major.
Vec noisy_block_image(int width, int height, unsigned seed);

// Catalog instance by name: "bilinear", "lasso", "tv" (default sizes).
ProblemInstance make_problem(const std::string& name);

using KeyValues = std::map<std::string, std::string>;

// key=value lines; '#' starts a comment; blank lines skipped; later keys win.
KeyValues parse_config_file(const std::string& path);

// Build a problem from merged settings. "problem" selects the instance
// (bilinear | lasso | tv | custom); catalog keys tune it (lasso: m, n, seed,
// reg; tv: width, height, seed, reg). problem=custom assembles pieces from
// L_csv plus function names f= and g= ("zero", "l1", "sq_l2", "box",
// "conjugate_of:<name>") with f_weight/g_weight, f_target_csv/g_target_csv,
// f_lo/f_hi/g_lo/g_hi. Solver keys (tau, sigma, theta, max_iter, stop_tol,
// regime) are ignored here; anything else throws ConfigError.
ProblemInstance load_problem(const KeyValues& kv);

}  // namespace pdcp
