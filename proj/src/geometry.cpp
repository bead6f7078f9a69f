#include "qcmean/geometry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qcmean {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a.dim()) + " vs " +
                                std::to_string(b.dim()) + ")");
  }
}
}  // namespace

Point::Point(std::vector<double> coords)
    : coords_(std::move(coords)), dim_(static_cast<int>(coords_.size())) {
  if (dim_ < 2) throw std::invalid_argument("Point: dimension must be >= 2");
  for (double c : coords_) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("Point: coordinates must be finite (use Point::infinity)");
    }
  }
}

Point::Point(int dim, bool infinite) : dim_(dim), infinite_(infinite) {
  if (dim_ < 2) throw std::invalid_argument("Point: dimension must be >= 2");
  if (!infinite_) coords_.assign(static_cast<std::size_t>(dim_), 0.0);
}

Point Point::infinity(int dim) { return Point(dim, true); }

Point Point::origin(int dim) { return Point(dim, false); }

Point Point::unit(int dim, int axis) {
  Point p = origin(dim);
  if (axis < 0 || axis >= dim) throw std::invalid_argument("Point::unit: axis out of range");
  p.coords_[static_cast<std::size_t>(axis)] = 1.0;
  return p;
}

const std::vector<double>& Point::coords() const {
  if (infinite_) throw std::logic_error("Point: the point at infinity has no coordinates");
  return coords_;
}

double Point::norm_sq() const {
  if (infinite_) return kInf;
  double s = 0.0;
  for (double c : coords_) s += c * c;
  return s;
}

double Point::norm() const { return infinite_ ? kInf : std::sqrt(norm_sq()); }

Point operator-(const Point& a, const Point& b) {
  require_same_dim(a, b, "Point difference");
  if (a.is_infinity() || b.is_infinity()) {
    throw std::invalid_argument("Point difference: operands must be finite");
  }
  std::vector<double> c(a.coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b.coords_[i];
  return Point(std::move(c));
}

Point operator+(const Point& a, const Point& b) {
  require_same_dim(a, b, "Point sum");
  if (a.is_infinity() || b.is_infinity()) {
    throw std::invalid_argument("Point sum: operands must be finite");
  }
  std::vector<double> c(a.coords_);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b.coords_[i];
  return Point(std::move(c));
}

Point operator*(double s, const Point& a) {
  if (a.is_infinity()) throw std::invalid_argument("Point scale: operand must be finite");
  std::vector<double> c(a.coords_);
  for (double& x : c) x *= s;
  return Point(std::move(c));
}

bool Point::operator==(const Point& o) const {
  if (dim_ != o.dim_) return false;
  if (infinite_ || o.infinite_) return infinite_ == o.infinite_;
  return coords_ == o.coords_;
}

double distance(const Point& a, const Point& b) {
  require_same_dim(a, b, "distance");
  if (a.is_infinity() && b.is_infinity()) return 0.0;
  if (a.is_infinity() || b.is_infinity()) return kInf;
  double s = 0.0;
  for (std::size_t i = 0; i < a.coords().size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double chordal_distance(const Point& x, const Point& y) {
  require_same_dim(x, y, "chordal_distance");
  if (x.is_infinity() && y.is_infinity()) return 0.0;
  if (x.is_infinity()) return 1.0 / std::sqrt(1.0 + y.norm_sq());
  if (y.is_infinity()) return 1.0 / std::sqrt(1.0 + x.norm_sq());
  const double num = distance(x, y);
  return num / (std::sqrt(1.0 + x.norm_sq()) * std::sqrt(1.0 + y.norm_sq()));
}

double chordal_diameter(const std::vector<Point>& sample) {
  if (sample.empty()) throw std::invalid_argument("chordal_diameter: empty sample");
  double best = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = i + 1; j < sample.size(); ++j) {
      best = std::max(best, chordal_distance(sample[i], sample[j]));
    }
  }
  return best;
}

Point invert(const Point& x) {
  if (x.is_infinity()) return Point::origin(x.dim());
  const double n2 = x.norm_sq();
  if (n2 == 0.0) return Point::infinity(x.dim());
  std::vector<double> c(x.coords());
  for (double& v : c) v /= n2;
  return Point(std::move(c));
}

DimensionConstants DimensionConstants::make(int dim) {
  if (dim < 2) throw std::invalid_argument("DimensionConstants: dim must be >= 2");
  const double n = static_cast<double>(dim);
  const double omega = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  return DimensionConstants{dim, omega, n * omega};
}

RingSpec::RingSpec(Point c, double r1, double r2)
    : center(std::move(c)), r_inner(r1), r_outer(r2), dim(center.dim()) {
  if (center.is_infinity()) throw std::invalid_argument("RingSpec: center must be finite");
  if (!(0.0 < r_inner && r_inner < r_outer)) {
    throw std::invalid_argument("RingSpec: need 0 < r_inner < r_outer");
  }
}

}  // namespace qcmean
