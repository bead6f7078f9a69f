#include "qcmean/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace qcmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_eval(const std::function<double(double)>& f, double x, double a, double b) {
  double v = f(x);
  if (std::isfinite(v)) return v;
  // Integrable endpoint singularities: sample a hair inside.
  const double width = b - a;
  if (x == a) {
    v = f(a + width * 1e-15);
  } else if (x == b) {
    v = f(b - width * 1e-15);
  }
  if (!std::isfinite(v)) {
    throw NumericError("integrate_1d: integrand not finite at x = " + std::to_string(x), 0.0);
  }
  return v;
}

struct SimpsonState {
  const std::function<double(double)>* f;
  int max_depth;
  double a, b;
  double leaked = 0.0;  // error surrendered at depth-exhausted leaves
};

double adaptive_simpson(SimpsonState& st, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = safe_eval(*st.f, lm, st.a, st.b);
  const double frm = safe_eval(*st.f, rm, st.a, st.b);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double refined = left + right;
  const double err = (refined - whole) / 15.0;
  if (depth <= 0) {
    st.leaked += std::abs(err);
    return refined + err;
  }
  if (std::abs(err) <= tol) return refined + err;
  return adaptive_simpson(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Gauss-Legendre nodes/weights on [-1, 1], cached by order.
const std::pair<std::vector<double>, std::vector<double>>& legendre_rule(int k) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;

  std::vector<double> x(static_cast<std::size_t>(k)), w(static_cast<std::size_t>(k));
  const int half = (k + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < k; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = k * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(k - 1 - i)] = z;
    const double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[static_cast<std::size_t>(i)] = wi;
    w[static_cast<std::size_t>(k - 1 - i)] = wi;
  }
  auto res = cache.emplace(k, std::make_pair(std::move(x), std::move(w)));
  return res.first->second;
}

double circle_mean(const std::function<double(const Point&)>& g, const Point& center, double r,
                   double rel_tol) {
  const double two_pi = 2.0 * std::numbers::pi;
  auto at_angle = [&](double theta) {
    std::vector<double> c(center.coords());
    c[0] += r * std::cos(theta);
    c[1] += r * std::sin(theta);
    return g(Point(std::move(c)));
  };
  int n = 16;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) sum += at_angle(two_pi * j / n);
  double prev = sum / n;
  const int max_doublings = max_refine_depth(18);
  for (int level = 0; level < max_doublings; ++level) {
    double add = 0.0;
    for (int j = 0; j < n; ++j) add += at_angle(two_pi * (j + 0.5) / n);
    sum += add;
    n *= 2;
    const double cur = sum / n;
    if (std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur)) && level >= 1) {
      return cur;
    }
    prev = cur;
  }
  throw NumericError("sphere_mean: trapezoid refinement exhausted", prev);
}

double sphere3_mean(const std::function<double(const Point&)>& g, const Point& center, double r,
                    double rel_tol) {
  const double two_pi = 2.0 * std::numbers::pi;
  auto at = [&](double theta, double u) {
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    std::vector<double> c(center.coords());
    c[0] += r * s * std::cos(theta);
    c[1] += r * s * std::sin(theta);
    c[2] += r * u;
    return g(Point(std::move(c)));
  };
  double prev = 0.0;
  bool have_prev = false;
  int n_theta = 16;
  int n_u = 8;
  const int max_doublings = max_refine_depth(10);
  for (int level = 0; level <= max_doublings; ++level) {
    const auto& [xs, ws] = legendre_rule(n_u);
    double acc = 0.0;
    for (std::size_t iu = 0; iu < xs.size(); ++iu) {
      double ring = 0.0;
      for (int j = 0; j < n_theta; ++j) ring += at(two_pi * j / n_theta, xs[iu]);
      acc += ws[iu] * (ring / n_theta);
    }
    const double cur = acc / 2.0;  // weights sum to 2
    if (have_prev && std::abs(cur - prev) <= rel_tol * std::max(1.0, std::abs(cur))) {
      return cur;
    }
    prev = cur;
    have_prev = true;
    n_theta *= 2;
    n_u *= 2;
  }
  throw NumericError("sphere_mean: cubature refinement exhausted", prev);
}

}  // namespace

int max_refine_depth(int fallback) {
  static const int from_env = [] {
    const char* s = std::getenv("QCMEAN_MAX_REFINE");
    if (s == nullptr) return -1;
    const long v = std::strtol(s, nullptr, 10);
    return (v > 0 && v < 1000000) ? static_cast<int>(v) : -1;
  }();
  return from_env > 0 ? from_env : fallback;
}

double integrate_1d(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(a < b)) throw std::invalid_argument("integrate_1d: need a < b");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("integrate_1d: tolerance must be positive");
  SimpsonState st;
  st.f = &f;
  st.max_depth = max_refine_depth(50);
  st.a = a;
  st.b = b;

  const double fa = safe_eval(f, a, a, b);
  const double fb = safe_eval(f, b, a, b);
  const double fm = safe_eval(f, 0.5 * (a + b), a, b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);

  // Coarse scan for the magnitude scale so the absolute tolerance tracks
  // the requested relative one.
  double scale = std::abs(whole);
  for (int j = 1; j < 16; ++j) {
    const double x = a + (b - a) * j / 16.0;
    scale = std::max(scale, std::abs(f(x)) * (b - a) / 16.0);
  }
  const double tol = rel_tol * std::max(scale, 1e-300);

  const double result = adaptive_simpson(st, a, b, fa, fm, fb, whole, tol, st.max_depth);
  if (st.leaked > 100.0 * tol + rel_tol * std::abs(result)) {
    throw NumericError("integrate_1d: refinement depth exhausted before meeting tolerance",
                       result);
  }
  return result;
}

double sphere_mean(const std::function<double(const Point&)>& g, const Point& center, double r,
                   int dim, double rel_tol) {
  if (center.is_infinity()) throw std::invalid_argument("sphere_mean: center must be finite");
  if (!(r > 0.0)) throw std::invalid_argument("sphere_mean: radius must be positive");
  if (center.dim() != dim) throw std::invalid_argument("sphere_mean: dimension mismatch");
  if (dim == 2) return circle_mean(g, center, r, rel_tol);
  if (dim == 3) return sphere3_mean(g, center, r, rel_tol);
  throw std::domain_error("sphere_mean: general cubature is available for dim 2 and 3 only");
}

double solve_monotone(const std::function<double(double)>& f, double target, BracketHint hint,
                      double tol) {
  if (!(hint.lo > 0.0) || !(hint.hi > hint.lo)) {
    throw std::invalid_argument("solve_monotone: need 0 < lo < hi in the bracket hint");
  }
  if (!std::isfinite(target)) throw std::invalid_argument("solve_monotone: target must be finite");

  double lo = hint.lo, hi = hint.hi;
  double flo = f(lo), fhi = f(hi);

  int guard = 0;
  while (fhi < target) {
    lo = hi;
    flo = fhi;
    hi *= 2.0;
    fhi = f(hi);
    if (++guard > 2000 || !(hi < kInf)) {
      throw NumericError("solve_monotone: bracket expansion exhausted above", hi);
    }
  }
  guard = 0;
  while (flo > target) {
    hi = lo;
    fhi = flo;
    lo *= 0.5;
    flo = f(lo);
    if (++guard > 2000 || lo < 1e-300) {
      throw NumericError("solve_monotone: target below f(0+)", lo);
    }
  }

  const double res_tol = tol * std::max(1.0, std::abs(target));
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 400; ++it) {
    mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (std::abs(fm - target) <= res_tol) return mid;
    if (fm < target) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mid))) break;
  }
  const double fm = f(mid);
  if (std::abs(fm - target) <= 1e3 * res_tol) return mid;
  throw NumericError("solve_monotone: bisection stalled; residual " +
                         std::to_string(fm - target),
                     mid);
}

}  // namespace qcmean
