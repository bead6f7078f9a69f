#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace qcmean {

/// Point of the extended space R^n plus the point at infinity, n >= 2.
class Point {
 public:
  explicit Point(std::vector<double> coords);
  static Point infinity(int dim);
  static Point origin(int dim);
  static Point unit(int dim, int axis);

  bool is_infinity() const { return infinite_; }
  int dim() const { return dim_; }
  const std::vector<double>& coords() const;
  double operator[](std::size_t i) const { return coords_[i]; }
  double norm() const;  // |x|; +inf for the point at infinity
  double norm_sq() const;

  friend Point operator-(const Point& a, const Point& b);
  friend Point operator+(const Point& a, const Point& b);
  friend Point operator*(double s, const Point& a);
  bool operator==(const Point& o) const;

 private:
  Point(int dim, bool infinite);
  std::vector<double> coords_;
  int dim_ = 0;
  bool infinite_ = false;
};

/// Euclidean distance; +inf when exactly one argument is the point at infinity.
double distance(const Point& a, const Point& b);

/// Chordal metric on the extended space; values in [0, 1].
double chordal_distance(const Point& x, const Point& y);

/// Max pairwise chordal distance over a non-empty sample.
double chordal_diameter(const std::vector<Point>& sample);

/// x / |x|^2 with the conventions 0 -> infinity and infinity -> 0.
Point invert(const Point& x);

/// Unit-ball volume and unit-sphere area for a given dimension.
struct DimensionConstants {
  int dim;
  double ball_volume;  // Omega_n
  double sphere_area;  // omega_{n-1} = n * Omega_n
  static DimensionConstants make(int dim);
};

/// Spherical ring 0 < r_inner < |x - center| < r_outer.
struct RingSpec {
  Point center;
  double r_inner;
  double r_outer;
  int dim;
  RingSpec(Point c, double r1, double r2);
};

}  // namespace qcmean
