#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "qcmean/geometry.hpp"

namespace qcmean {

/// Numerical failure carrying the best partial estimate obtained so far.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double partial = 0.0)
      : std::runtime_error(what), partial_(partial) {}
  double partial() const { return partial_; }

 private:
  double partial_;
};

/// Default tolerances; every entry point accepts overrides.
struct Tolerances {
  double quadrature_rel = 1e-9;
  double root_tol = 1e-12;
};

/// Depth/refinement cap, overridable via the QCMEAN_MAX_REFINE environment variable.
int max_refine_depth(int fallback);

/// Adaptive quadrature of f over (a, b) with a relative-error target.
/// Endpoint values that are not finite are sampled a hair inside the interval;
/// a non-finite value at an interior node raises NumericError.
double integrate_1d(const std::function<double(double)>& f, double a, double b,
                    double rel_tol = 1e-9);

/// Area-measure average of g over the sphere |x - center| = r.
/// dim 2 uses the periodic trapezoid rule, dim 3 Gauss-Legendre x trapezoid.
double sphere_mean(const std::function<double(const Point&)>& g, const Point& center,
                   double r, int dim, double rel_tol = 1e-9);

struct BracketHint {
  double lo;
  double hi;
};

/// Solves f(t) = target for a continuous strictly increasing f by bracket
/// expansion followed by bisection; |f(t) - target| <= tol * max(1, |target|).
double solve_monotone(const std::function<double(double)>& f, double target,
                      BracketHint hint, double tol = 1e-12);

}  // namespace qcmean
