#include "qcmean/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcmean/numerics.hpp"

namespace qcmean {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_throw(double v, const char* what) {
  if (std::isinf(v)) throw NumericError(std::string(what) + ": integral is infinite", v);
  return v;
}
}  // namespace

// ---------------------------------------------------------------------------
// Domain

Domain Domain::ball(Point center, double radius) {
  if (center.is_infinity()) throw std::invalid_argument("Domain::ball: center must be finite");
  if (!(radius > 0.0)) throw std::invalid_argument("Domain::ball: radius must be positive");
  Domain d;
  d.type = Type::Ball;
  d.center = std::move(center);
  d.r1 = 0.0;
  d.r2 = radius;
  return d;
}

Domain Domain::ring(Point center, double r1, double r2) {
  if (center.is_infinity()) throw std::invalid_argument("Domain::ring: center must be finite");
  if (!(0.0 < r1 && r1 < r2)) throw std::invalid_argument("Domain::ring: need 0 < r1 < r2");
  Domain d;
  d.type = Type::Ring;
  d.center = std::move(center);
  d.r1 = r1;
  d.r2 = r2;
  return d;
}

Domain Domain::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.size() < 2) {
    throw std::invalid_argument("Domain::box: lo/hi must agree and have dimension >= 2");
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw std::invalid_argument("Domain::box: need lo < hi per axis");
  }
  Domain d;
  d.type = Type::Box;
  d.center = Point::origin(static_cast<int>(lo.size()));
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Domain Domain::space(int dim) {
  Domain d;
  d.type = Type::Space;
  d.center = Point::origin(dim);
  d.r2 = kInf;
  return d;
}

int Domain::dim() const { return center.dim(); }

bool Domain::contains(const Point& x, double pad) const {
  if (x.is_infinity()) return type == Type::Space;
  if (x.dim() != dim()) return false;
  switch (type) {
    case Type::Ball:
      return distance(x, center) <= r2 + pad;
    case Type::Ring: {
      const double d = distance(x, center);
      return d >= r1 - pad && d <= r2 + pad;
    }
    case Type::Box:
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (x[i] < lo[i] - pad || x[i] > hi[i] + pad) return false;
      }
      return true;
    case Type::Space:
      return true;
  }
  return false;
}

bool Domain::contains_sphere(const Point& c, double r, double pad) const {
  if (c.is_infinity() || c.dim() != dim()) return false;
  switch (type) {
    case Type::Ball:
      return distance(c, center) + r <= r2 + pad;
    case Type::Ring: {
      const double d = distance(c, center);
      return d + r <= r2 + pad && std::abs(d - r) >= r1 - pad;
    }
    case Type::Box:
      for (std::size_t i = 0; i < lo.size(); ++i) {
        if (c[i] - r < lo[i] - pad || c[i] + r > hi[i] + pad) return false;
      }
      return true;
    case Type::Space:
      return true;
  }
  return false;
}

std::string Domain::describe() const {
  switch (type) {
    case Type::Ball: return "ball(r=" + std::to_string(r2) + ")";
    case Type::Ring: return "ring(" + std::to_string(r1) + "," + std::to_string(r2) + ")";
    case Type::Box: return "box";
    case Type::Space: return "space";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// GridData

double GridData::interpolate(const Point& x) const {
  if (x.is_infinity()) throw std::domain_error("grid field: query at infinity");
  if (x.dim() != dim) throw std::invalid_argument("grid field: dimension mismatch");
  std::vector<std::size_t> idx(static_cast<std::size_t>(dim));
  std::vector<double> frac(static_cast<std::size_t>(dim));
  for (int k = 0; k < dim; ++k) {
    const auto& ax = axes[static_cast<std::size_t>(k)];
    const double v = x[static_cast<std::size_t>(k)];
    if (v < ax.front() - 1e-12 || v > ax.back() + 1e-12) {
      throw std::domain_error("grid field: query outside the sampled lattice");
    }
    auto it = std::upper_bound(ax.begin(), ax.end(), v);
    std::size_t j = static_cast<std::size_t>(it - ax.begin());
    if (j == 0) j = 1;
    if (j >= ax.size()) j = ax.size() - 1;
    idx[static_cast<std::size_t>(k)] = j - 1;
    frac[static_cast<std::size_t>(k)] =
        std::clamp((v - ax[j - 1]) / (ax[j] - ax[j - 1]), 0.0, 1.0);
  }
  // strides, row-major over the axes
  std::vector<std::size_t> stride(static_cast<std::size_t>(dim), 1);
  for (int k = dim - 2; k >= 0; --k) {
    stride[static_cast<std::size_t>(k)] =
        stride[static_cast<std::size_t>(k + 1)] * axes[static_cast<std::size_t>(k + 1)].size();
  }
  double acc = 0.0;
  const int corners = 1 << dim;
  for (int mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t offset = 0;
    for (int k = 0; k < dim; ++k) {
      const bool high = (mask >> k) & 1;
      const std::size_t kk = static_cast<std::size_t>(k);
      w *= high ? frac[kk] : 1.0 - frac[kk];
      offset += (idx[kk] + (high ? 1 : 0)) * stride[kk];
    }
    acc += w * values[offset];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// DistortionField

struct DistortionField::Impl {
  Kind kind = Kind::Constant;
  int dim = 2;
  Domain dom = Domain::ball(Point::origin(2), 1.0);
  double c = 1.0;
  std::function<double(double)> profile;
  Point center = Point::origin(2);
  std::function<double(const Point&)> fn;
  GridData grid;
  std::string label;
};

DistortionField::DistortionField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

DistortionField DistortionField::constant(double c, int dim, std::optional<Domain> domain) {
  if (!(c >= 0.0)) throw std::invalid_argument("DistortionField::constant: c must be >= 0");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Constant;
  impl->dim = dim;
  impl->c = c;
  impl->center = Point::origin(dim);
  impl->dom = domain.value_or(Domain::ball(Point::origin(dim), 1.0));
  if (impl->dom.dim() != dim) throw std::invalid_argument("DistortionField: domain dimension mismatch");
  return DistortionField(impl);
}

DistortionField DistortionField::radial(std::function<double(double)> profile, Point center,
                                        std::optional<Domain> domain, std::string label) {
  if (center.is_infinity()) throw std::invalid_argument("DistortionField::radial: center must be finite");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Radial;
  impl->dim = center.dim();
  impl->profile = std::move(profile);
  impl->center = std::move(center);
  impl->dom = domain.value_or(Domain::ball(impl->center, 1.0));
  impl->label = std::move(label);
  if (impl->dom.dim() != impl->dim) throw std::invalid_argument("DistortionField: domain dimension mismatch");
  return DistortionField(impl);
}

DistortionField DistortionField::analytic(std::function<double(const Point&)> f, int dim,
                                          std::optional<Domain> domain, std::string label) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Analytic;
  impl->dim = dim;
  impl->fn = std::move(f);
  impl->center = Point::origin(dim);
  impl->dom = domain.value_or(Domain::ball(Point::origin(dim), 1.0));
  impl->label = std::move(label);
  if (impl->dom.dim() != dim) throw std::invalid_argument("DistortionField: domain dimension mismatch");
  return DistortionField(impl);
}

DistortionField DistortionField::grid(GridData data) {
  if (data.dim < 2 || data.dim > 3) {
    throw std::invalid_argument("DistortionField::grid: grid fields support dim 2 and 3");
  }
  if (static_cast<int>(data.axes.size()) != data.dim) {
    throw std::invalid_argument("DistortionField::grid: axis count mismatch");
  }
  std::size_t expected = 1;
  for (const auto& ax : data.axes) {
    if (ax.size() < 2 || !std::is_sorted(ax.begin(), ax.end())) {
      throw std::invalid_argument("DistortionField::grid: axes must be increasing with >= 2 samples");
    }
    expected *= ax.size();
  }
  if (data.values.size() != expected) {
    throw std::invalid_argument("DistortionField::grid: value count does not match the lattice");
  }
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Grid;
  impl->dim = data.dim;
  impl->center = Point::origin(data.dim);
  std::vector<double> lo, hi;
  for (const auto& ax : data.axes) {
    lo.push_back(ax.front());
    hi.push_back(ax.back());
  }
  impl->dom = Domain::box(lo, hi);
  impl->grid = std::move(data);
  return DistortionField(impl);
}

double DistortionField::eval(const Point& x) const {
  const Impl& im = *impl_;
  if (!x.is_infinity() && x.dim() != im.dim) {
    throw std::invalid_argument("DistortionField::eval: dimension mismatch");
  }
  switch (im.kind) {
    case Kind::Constant:
      return im.c;
    case Kind::Radial:
      return im.profile(distance(x, im.center));
    case Kind::Analytic:
      return im.fn(x);
    case Kind::Grid:
      return im.grid.interpolate(x);
  }
  return 0.0;
}

int DistortionField::dim() const { return impl_->dim; }
DistortionField::Kind DistortionField::kind() const { return impl_->kind; }
const Domain& DistortionField::domain() const { return impl_->dom; }
const Point& DistortionField::center() const { return impl_->center; }

bool DistortionField::radial_about(const Point& c) const {
  const Impl& im = *impl_;
  if (im.kind == Kind::Constant) return true;
  if (im.kind != Kind::Radial) return false;
  return !c.is_infinity() && distance(c, im.center) <= 1e-14;
}

double DistortionField::radial_value(double r) const {
  const Impl& im = *impl_;
  if (im.kind == Kind::Constant) return im.c;
  if (im.kind == Kind::Radial) return im.profile(r);
  throw std::logic_error("DistortionField::radial_value: field is not radial");
}

std::string DistortionField::describe() const {
  const Impl& im = *impl_;
  switch (im.kind) {
    case Kind::Constant: return "constant(" + std::to_string(im.c) + ")";
    case Kind::Radial: return im.label.empty() ? "radial" : "radial(" + im.label + ")";
    case Kind::Analytic: return im.label.empty() ? "analytic" : "analytic(" + im.label + ")";
    case Kind::Grid: return "grid";
  }
  return "?";
}

DistortionField truncate_unit_floor(const DistortionField& q) {
  switch (q.kind()) {
    case DistortionField::Kind::Constant:
      return DistortionField::constant(std::max(q.radial_value(0.0), 1.0), q.dim(), q.domain());
    case DistortionField::Kind::Radial: {
      DistortionField base = q;
      return DistortionField::radial(
          [base](double r) { return std::max(base.radial_value(r), 1.0); }, q.center(),
          q.domain(), "max(" + q.describe() + ",1)");
    }
    default: {
      DistortionField base = q;
      return DistortionField::analytic(
          [base](const Point& x) { return std::max(base.eval(x), 1.0); }, q.dim(), q.domain(),
          "max(" + q.describe() + ",1)");
    }
  }
}

DistortionField apply_gauge(const Gauge& phi, const DistortionField& q) {
  switch (q.kind()) {
    case DistortionField::Kind::Constant:
      return DistortionField::constant(phi.eval(q.radial_value(0.0)), q.dim(), q.domain());
    case DistortionField::Kind::Radial: {
      DistortionField base = q;
      return DistortionField::radial([phi, base](double r) { return phi.eval(base.radial_value(r)); },
                                     q.center(), q.domain(),
                                     phi.describe() + " o " + q.describe());
    }
    default: {
      DistortionField base = q;
      return DistortionField::analytic([phi, base](const Point& x) { return phi.eval(base.eval(x)); },
                                       q.dim(), q.domain(),
                                       phi.describe() + " o " + q.describe());
    }
  }
}

DistortionField invert_about_origin(const DistortionField& q) {
  const int n = q.dim();
  switch (q.kind()) {
    case DistortionField::Kind::Constant:
      return DistortionField::constant(q.radial_value(0.0), n, Domain::space(n));
    case DistortionField::Kind::Radial: {
      if (q.center().norm() > 1e-14) {
        throw std::invalid_argument("invert_about_origin: radial fields must be centred at 0");
      }
      DistortionField base = q;
      return DistortionField::radial([base](double r) { return base.radial_value(1.0 / r); },
                                     Point::origin(n), Domain::space(n),
                                     q.describe() + " at 1/r");
    }
    default: {
      DistortionField base = q;
      return DistortionField::analytic([base](const Point& x) { return base.eval(invert(x)); },
                                       n, Domain::space(n), q.describe() + " inverted");
    }
  }
}

// ---------------------------------------------------------------------------
// Means

double MeanProfile::q(double r) const {
  if (evaluator) return evaluator(r);
  if (radii.empty()) throw std::logic_error("MeanProfile: no samples and no evaluator");
  if (r < radii.front() - 1e-12 || r > radii.back() + 1e-12) {
    throw std::domain_error("MeanProfile: requested radius outside the sampled range");
  }
  auto it = std::upper_bound(radii.begin(), radii.end(), r);
  std::size_t j = static_cast<std::size_t>(it - radii.begin());
  if (j == 0) j = 1;
  if (j >= radii.size()) j = radii.size() - 1;
  const double lr = std::log(std::clamp(r, radii.front(), radii.back()));
  const double l0 = std::log(radii[j - 1]);
  const double l1 = std::log(radii[j]);
  const double w = (lr - l0) / (l1 - l0);
  return values[j - 1] * (1.0 - w) + values[j] * w;
}

MeanProfile spherical_mean_profile(const DistortionField& q, const Point& x0,
                                   std::vector<double> radii, double rel_tol) {
  if (radii.empty()) throw std::invalid_argument("spherical_mean_profile: empty radius grid");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0) || (i > 0 && !(radii[i] > radii[i - 1]))) {
      throw std::invalid_argument("spherical_mean_profile: radii must be positive and increasing");
    }
    if (!q.domain().contains_sphere(x0, radii[i])) {
      throw std::domain_error("spherical_mean_profile: sphere of radius " +
                              std::to_string(radii[i]) + " exits the field domain");
    }
  }

  MeanProfile prof;
  prof.center = x0;
  prof.radii = std::move(radii);

  if (q.radial_about(x0)) {
    DistortionField base = q;
    prof.evaluator = [base](double r) { return base.radial_value(r); };
  } else if (q.dim() == 2 || q.dim() == 3) {
    DistortionField base = q;
    const int dim = q.dim();
    prof.evaluator = [base, x0, dim, rel_tol](double r) {
      return sphere_mean([&base](const Point& p) { return base.eval(p); }, x0, r, dim, rel_tol);
    };
  } else {
    throw std::domain_error(
        "spherical_mean_profile: dim >= 4 is supported for radial and constant fields only");
  }

  prof.values.reserve(prof.radii.size());
  for (double r : prof.radii) prof.values.push_back(prof.evaluator(r));
  return prof;
}

double ring_mean(const DistortionField& g, const Point& center, double eps, double rel_tol) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ring_mean: need 0 < eps < 1");
  const int n = g.dim();
  const auto dc = DimensionConstants::make(n);
  const double denom = dc.ball_volume * (1.0 - std::pow(eps, n));

  double integral = 0.0;
  if (g.radial_about(center)) {
    DistortionField base = g;
    integral = dc.sphere_area *
               integrate_1d(
                   [&](double r) { return base.radial_value(r) * std::pow(r, n - 1); }, eps, 1.0,
                   rel_tol);
  } else if (n == 2 || n == 3) {
    DistortionField base = g;
    integral = dc.sphere_area *
               integrate_1d(
                   [&](double r) {
                     const double m = sphere_mean(
                         [&base](const Point& p) { return base.eval(p); }, center, r, n, rel_tol);
                     return m * std::pow(r, n - 1);
                   },
                   eps, 1.0, rel_tol);
  } else {
    throw std::domain_error("ring_mean: dim >= 4 needs a radial or constant field");
  }
  return finite_or_throw(integral, "ring_mean") / denom;
}

namespace {

// integral of f over (a, b] where f may blow up at a = 0: geometric shells
// towards the inner edge with divergence detection.
double radial_integral(const std::function<double(double)>& f, double a, double b,
                       double rel_tol) {
  if (a > 1e-12) return integrate_1d(f, a, b, rel_tol);
  double acc = integrate_1d(f, 0.5 * b, b, rel_tol);
  double hi = 0.5 * b;
  int growing = 0;
  double prev_piece = 0.0;
  for (int k = 0; k < 400; ++k) {
    const double lo = 0.5 * hi;
    const double piece = integrate_1d(f, lo, hi, rel_tol);
    acc += piece;
    if (piece > prev_piece && piece > rel_tol * std::max(1.0, acc) && k > 0) {
      if (++growing >= 8) {
        throw NumericError("radial integral appears divergent towards the centre", acc);
      }
    } else {
      growing = 0;
    }
    prev_piece = piece;
    if (piece <= 0.02 * rel_tol * std::max(1.0, std::abs(acc)) && k >= 8) return acc;
    hi = lo;
  }
  throw NumericError("radial integral did not settle towards the centre", acc);
}

// integral over [lo, infinity) by decade partial sums; NumericError when the
// increments do not settle.
double decade_tail_integral(const std::function<double(double)>& f, double lo, double rel_tol) {
  double acc = 0.0;
  double prev = lo;
  for (int k = 0; k < 14; ++k) {
    const double hi = std::max(1.0, prev) * 10.0;
    const double inc = integrate_1d(f, prev, hi, rel_tol);
    acc += inc;
    prev = hi;
    if (inc <= rel_tol * std::max(1.0, acc) && k >= 2) return acc;
  }
  throw NumericError("integral over an unbounded domain did not settle", acc);
}

}  // namespace

double class_membership_integral(const Gauge& phi, const DistortionField& q, bool weighted,
                                 std::optional<Domain> over, double rel_tol) {
  const Domain dom = over.value_or(q.domain());
  const int n = q.dim();
  if (dom.dim() != n) throw std::invalid_argument("class_membership_integral: domain dimension mismatch");
  const auto dc = DimensionConstants::make(n);
  const DistortionField composed = apply_gauge(phi, q);
  const bool center_is_origin = !dom.center.is_infinity() && dom.center.norm() <= 1e-14;

  auto weight = [n](double rho_sq) { return 1.0 / std::pow(1.0 + rho_sq, n); };

  double value = 0.0;
  switch (dom.type) {
    case Domain::Type::Ball:
    case Domain::Type::Ring: {
      const double a = dom.type == Domain::Type::Ball ? 0.0 : dom.r1;
      const double b = dom.r2;
      if (composed.radial_about(dom.center) && (!weighted || center_is_origin)) {
        value = dc.sphere_area *
                radial_integral(
                    [&](double r) {
                      const double v = composed.radial_value(r) * std::pow(r, n - 1);
                      return weighted ? v * weight(r * r) : v;
                    },
                    a, b, rel_tol);
      } else if (n == 2 || n == 3) {
        value = dc.sphere_area *
                radial_integral(
                    [&](double r) {
                      const double m = sphere_mean(
                          [&](const Point& p) {
                            const double v = composed.eval(p);
                            return weighted ? v * weight(p.norm_sq()) : v;
                          },
                          dom.center, r, n, rel_tol);
                      return m * std::pow(r, n - 1);
                    },
                    a, b, rel_tol);
      } else {
        throw std::domain_error("class_membership_integral: dim >= 4 needs a radial field");
      }
      break;
    }
    case Domain::Type::Box: {
      if (n != 2) throw std::domain_error("class_membership_integral: box domains support dim 2");
      auto inner = [&](double x1) {
        return integrate_1d(
            [&](double x2) {
              const Point p(std::vector<double>{x1, x2});
              const double v = composed.eval(p);
              return weighted ? v * weight(p.norm_sq()) : v;
            },
            dom.lo[1], dom.hi[1], rel_tol);
      };
      value = integrate_1d(inner, dom.lo[0], dom.hi[0], std::max(rel_tol, 1e-8));
      break;
    }
    case Domain::Type::Space: {
      if (!weighted) {
        throw std::invalid_argument(
            "class_membership_integral: unbounded domains require the weighted form");
      }
      if (!composed.radial_about(Point::origin(n))) {
        throw std::domain_error(
            "class_membership_integral: unbounded domains need a radial field about the origin");
      }
      value = dc.sphere_area *
              decade_tail_integral(
                  [&](double r) {
                    return composed.radial_value(r) * std::pow(r, n - 1) * weight(r * r);
                  },
                  1e-300, rel_tol);
      break;
    }
  }
  return finite_or_throw(value, "class_membership_integral");
}

double weighted_volume(const Domain& domain, double rel_tol) {
  const int n = domain.dim();
  const auto dc = DimensionConstants::make(n);
  const bool center_is_origin = domain.center.norm() <= 1e-14;
  auto weight = [n](double rho_sq) { return 1.0 / std::pow(1.0 + rho_sq, n); };

  switch (domain.type) {
    case Domain::Type::Ball:
    case Domain::Type::Ring: {
      const double a = domain.type == Domain::Type::Ball ? 0.0 : domain.r1;
      if (center_is_origin) {
        return dc.sphere_area *
               integrate_1d([&](double r) { return std::pow(r, n - 1) * weight(r * r); },
                            a, domain.r2, rel_tol);
      }
      if (n == 2 || n == 3) {
        return dc.sphere_area *
               integrate_1d(
                   [&](double r) {
                     const double m = sphere_mean(
                         [&](const Point& p) { return weight(p.norm_sq()); }, domain.center, r, n,
                         rel_tol);
                     return m * std::pow(r, n - 1);
                   },
                   a, domain.r2, rel_tol);
      }
      throw std::domain_error("weighted_volume: off-centre domains support dim 2 and 3");
    }
    case Domain::Type::Box: {
      if (n != 2) throw std::domain_error("weighted_volume: box domains support dim 2");
      auto inner = [&](double x1) {
        return integrate_1d(
            [&](double x2) {
              return weight(x1 * x1 + x2 * x2);
            },
            domain.lo[1], domain.hi[1], rel_tol);
      };
      return integrate_1d(inner, domain.lo[0], domain.hi[0], std::max(rel_tol, 1e-8));
    }
    case Domain::Type::Space:
      return dc.sphere_area *
             decade_tail_integral(
                 [&](double r) { return std::pow(r, n - 1) * weight(r * r); }, 1e-300, rel_tol);
  }
  return 0.0;
}

}  // namespace qcmean
