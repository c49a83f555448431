#include "pdcp/prox.hpp"

#include <cmath>
#include <random>

namespace pdcp {

namespace {

// Representation guard for set-membership evals. Prox outputs are exactly
// feasible, but averages of feasible points can drift a couple of ulps
// outside the set under fp summation; the band is orders of magnitude below
// every tolerance asserted elsewhere.
double guard(double scale) { return 1e-14 * (1.0 + std::abs(scale)); }

void require_positive(double tau, const char* who) {
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw ConfigError(std::string(who) + ": step must be positive and finite");
}

}  // namespace

Vec prox_zero(double tau, const Vec& x) {
  require_positive(tau, "prox_zero");
  return x;
}

Vec prox_l1(double tau, const Vec& x) {
  require_positive(tau, "prox_l1");
  Vec p(x.size());
  for (int i = 0; i < x.size(); ++i) {
    double a = std::abs(x(i)) - tau;
    p(i) = a > 0.0 ? (x(i) > 0.0 ? a : -a) : 0.0;
  }
  return p;
}

Vec prox_sq_l2(double tau, const Vec& x, const Vec& target, double weight) {
  require_positive(tau, "prox_sq_l2");
  if (target.size() != x.size())
    throw ConfigError("prox_sq_l2: target dimension mismatch");
  if (!(weight > 0.0)) throw ConfigError("prox_sq_l2: weight must be positive");
  return (x + tau * weight * target) / (1.0 + tau * weight);
}

Vec prox_box(double tau, const Vec& x, const Vec& lo, const Vec& hi) {
  require_positive(tau, "prox_box");
  if (lo.size() != x.size() || hi.size() != x.size())
    throw ConfigError("prox_box: bound dimension mismatch");
  Vec p(x.size());
  for (int i = 0; i < x.size(); ++i) {
    if (lo(i) > hi(i)) throw ConfigError("prox_box: crossed bounds at component " + std::to_string(i));
    p(i) = std::min(std::max(x(i), lo(i)), hi(i));
  }
  return p;
}

Vec prox_conjugate(const ProxFunction& base, double sigma, const Vec& y) {
  require_positive(sigma, "prox_conjugate");
  return y - sigma * base.prox(1.0 / sigma, y / sigma);
}

ProxFunction zero_function() {
  ProxFunction f;
  f.name = "zero";
  f.eval = [](const Vec&) { return 0.0; };
  f.prox = [](double tau, const Vec& x) { return prox_zero(tau, x); };
  // Conjugate is the indicator of {0}; its prox is the exact projection.
  f.conjugate_eval = [](const Vec& u) {
    for (int i = 0; i < u.size(); ++i)
      if (std::abs(u(i)) > guard(0.0)) return kInf;
    return 0.0;
  };
  f.conjugate_prox = [](double, const Vec& y) { return Vec(Vec::Zero(y.size())); };
  return f;
}

ProxFunction l1_norm(double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight))
    throw ConfigError("l1_norm: weight must be finite and nonnegative");
  ProxFunction f;
  f.name = "l1";
  f.eval = [weight](const Vec& x) { return weight * x.lpNorm<1>(); };
  f.prox = [weight](double tau, const Vec& x) {
    require_positive(tau, "l1_norm::prox");
    if (weight == 0.0) return x;
    return prox_l1(tau * weight, x);
  };
  // Conjugate is the indicator of the inf-ball of radius weight; clamping is
  // its exact projection (kept direct so iterates stay exactly feasible).
  f.conjugate_eval = [weight](const Vec& u) {
    for (int i = 0; i < u.size(); ++i)
      if (std::abs(u(i)) > weight + guard(weight)) return kInf;
    return 0.0;
  };
  f.conjugate_prox = [weight](double, const Vec& y) {
    Vec p(y.size());
    for (int i = 0; i < y.size(); ++i)
      p(i) = std::min(std::max(y(i), -weight), weight);
    return p;
  };
  return f;
}

ProxFunction squared_l2(Vec target, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight))
    throw ConfigError("squared_l2: weight must be finite and positive");
  ProxFunction f;
  f.name = "sq_l2";
  Vec t = std::move(target);
  f.eval = [t, weight](const Vec& x) {
    if (x.size() != t.size()) throw ConfigError("sq_l2: dimension mismatch");
    return 0.5 * weight * (x - t).squaredNorm();
  };
  f.prox = [t, weight](double tau, const Vec& x) {
    return prox_sq_l2(tau, x, t, weight);
  };
  // f*(u) = <u, t> + ||u||^2 / (2 weight), prox in closed form.
  f.conjugate_eval = [t, weight](const Vec& u) {
    if (u.size() != t.size()) throw ConfigError("sq_l2 conjugate: dimension mismatch");
    return u.dot(t) + u.squaredNorm() / (2.0 * weight);
  };
  f.conjugate_prox = [t, weight](double sigma, const Vec& y) {
    require_positive(sigma, "sq_l2::conjugate_prox");
    return Vec(weight * (y - sigma * t) / (weight + sigma));
  };
  return f;
}

ProxFunction box_indicator(Vec lo, Vec hi) {
  if (lo.size() != hi.size())
    throw ConfigError("box_indicator: bound dimension mismatch");
  for (int i = 0; i < lo.size(); ++i)
    if (lo(i) > hi(i))
      throw ConfigError("box_indicator: crossed bounds at component " + std::to_string(i));
  ProxFunction f;
  f.name = "box";
  Vec l = std::move(lo), h = std::move(hi);
  f.eval = [l, h](const Vec& x) {
    if (x.size() != l.size()) throw ConfigError("box: dimension mismatch");
    for (int i = 0; i < x.size(); ++i) {
      double g = guard(std::max(std::abs(l(i)), std::abs(h(i))));
      if (x(i) < l(i) - g || x(i) > h(i) + g) return kInf;
    }
    return 0.0;
  };
  f.prox = [l, h](double tau, const Vec& x) { return prox_box(tau, x, l, h); };
  // Support function of the box.
  f.conjugate_eval = [l, h](const Vec& u) {
    if (u.size() != l.size()) throw ConfigError("box conjugate: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < u.size(); ++i) s += std::max(u(i) * l(i), u(i) * h(i));
    return s;
  };
  return f;
}

ProxFunction conjugate_of(const ProxFunction& base) {
  ProxFunction f;
  f.name = "conjugate_of:" + base.name;
  if (base.conjugate_eval) {
    f.eval = base.conjugate_eval;
  } else {
    std::string name = base.name;
    f.eval = [name](const Vec&) -> double {
      throw CertificateError("conjugate_of: no closed-form conjugate value for '" +
                             name + "'");
    };
  }
  if (base.conjugate_prox) {
    f.prox = base.conjugate_prox;
  } else {
    ProxFunction copy = base;
    f.prox = [copy](double sigma, const Vec& y) {
      return prox_conjugate(copy, sigma, y);
    };
  }
  // Biconjugation: the catalog holds proper closed convex functions.
  f.conjugate_eval = base.eval;
  f.conjugate_prox = base.prox;
  return f;
}

SubgradientCheck check_subgradient_inequality(const ProxFunction& fn,
                                              const Vec& p, const Vec& s,
                                              const std::vector<Vec>& samples) {
  double fp = fn.eval(p);
  if (!std::isfinite(fp)) return {false, kInf};
  double tol = 1e-9 * (1.0 + std::abs(fp));
  double worst = -kInf;
  for (const Vec& z : samples) {
    double fz = fn.eval(z);
    if (!std::isfinite(fz)) continue;
    double violation = fp + s.dot(z - p) - fz;
    if (violation > worst) worst = violation;
  }
  return {worst <= tol, worst};
}

std::vector<Vec> inclusion_samples(const Vec& p, int count, unsigned seed) {
  static const double scales[3] = {0.1, 1.0, 10.0};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double base = 1.0 + p.norm();
  std::vector<Vec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double r = scales[i % 3] * base;
    Vec z(p.size());
    for (int j = 0; j < z.size(); ++j) z(j) = p(j) + r * gauss(rng);
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace pdcp
