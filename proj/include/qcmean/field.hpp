#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcmean/gauge.hpp"
#include "qcmean/geometry.hpp"

namespace qcmean {

/// Geometric support of a field and integration region descriptor.
struct Domain {
  enum class Type { Ball, Ring, Box, Space };
  Type type = Type::Ball;
  Point center = Point::origin(2);
  double r1 = 0.0;
  double r2 = 1.0;
  std::vector<double> lo, hi;

  static Domain ball(Point center, double radius);
  static Domain ring(Point center, double r1, double r2);
  static Domain box(std::vector<double> lo, std::vector<double> hi);
  static Domain space(int dim);

  int dim() const;
  bool contains(const Point& x, double pad = 1e-12) const;
  bool contains_sphere(const Point& c, double r, double pad = 1e-12) const;
  std::string describe() const;
};

/// Samples of a scalar field on a regular lattice (row-major over the axes).
struct GridData {
  int dim = 2;
  std::vector<std::vector<double>> axes;  // strictly increasing coordinates per axis
  std::vector<double> values;
  double interpolate(const Point& x) const;  // multilinear; throws outside the lattice
};

/// Distortion coefficient Q with values in [0, infinity]. Immutable.
class DistortionField {
 public:
  enum class Kind { Constant, Radial, Analytic, Grid };

  static DistortionField constant(double c, int dim, std::optional<Domain> domain = {});
  static DistortionField radial(std::function<double(double)> profile, Point center,
                                std::optional<Domain> domain = {}, std::string label = "");
  static DistortionField analytic(std::function<double(const Point&)> f, int dim,
                                  std::optional<Domain> domain = {}, std::string label = "");
  static DistortionField grid(GridData data);

  double eval(const Point& x) const;
  double operator()(const Point& x) const { return eval(x); }

  int dim() const;
  Kind kind() const;
  const Domain& domain() const;
  const Point& center() const;

  /// True when sphere means about c are exact 1-D lookups (constant fields,
  /// or radial fields centred at c).
  bool radial_about(const Point& c) const;
  double radial_value(double r) const;

  std::string describe() const;

 private:
  struct Impl;
  explicit DistortionField(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Pointwise max(Q, 1); idempotent, preserves the field kind.
DistortionField truncate_unit_floor(const DistortionField& q);

/// The composed field phi(Q(x)); preserves constant/radial structure.
DistortionField apply_gauge(const Gauge& phi, const DistortionField& q);

/// The pulled-back field Q'(x) = Q(x/|x|^2) used when working about the point
/// at infinity; preserves constant/radial structure about the origin.
DistortionField invert_about_origin(const DistortionField& q);

/// Sphere averages q_{x0}(r) of a field over a radius grid, with an exact
/// evaluator for arbitrary radii.
struct MeanProfile {
  Point center = Point::origin(2);
  std::vector<double> radii;
  std::vector<double> values;
  double p_context = 1.0;
  std::function<double(double)> evaluator;

  double q(double r) const;  // evaluator when present, log-r interpolation otherwise
};

MeanProfile spherical_mean_profile(const DistortionField& q, const Point& x0,
                                   std::vector<double> radii, double rel_tol = 1e-9);

/// Volume average of g over the ring eps < |x - center| < 1.
double ring_mean(const DistortionField& g, const Point& center, double eps,
                 double rel_tol = 1e-9);

/// integral of phi(Q(x)) dm(x), optionally against the chordal weight
/// (1 + |x|^2)^{-n}, over the field's domain or an explicit one.
double class_membership_integral(const Gauge& phi, const DistortionField& q, bool weighted,
                                 std::optional<Domain> over = {}, double rel_tol = 1e-9);

/// integral of dm(x) / (1 + |x|^2)^n over the domain.
double weighted_volume(const Domain& domain, double rel_tol = 1e-9);

}  // namespace qcmean
