#include "qcmean/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "qcmean/numerics.hpp"

namespace qcmean {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> geometric_grid(double lo, double hi, int count) {
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1)));
  }
  return g;
}
}  // namespace

double ExtremalSetup::phi(double t) const {
  if (t < 1.0) return t;
  return transformed_.eval(t);
}

double ExtremalSetup::phi_nm1(double t) const { return phi(std::pow(t, dim_ - 1.0)); }

double ExtremalSetup::phi_nm1_inverse(double tau) const {
  if (tau <= 0.0) return 0.0;
  if (tau < 1.0) return std::pow(tau, 1.0 / (dim_ - 1.0));
  return std::max(1.0, std::pow(transformed_.inverse(tau), 1.0 / (dim_ - 1.0)));
}

double ExtremalSetup::phi_nm1_inverse_from_log(double log_tau) const {
  if (log_tau < 0.0) return std::exp(log_tau / (dim_ - 1.0));
  return std::max(1.0, std::pow(transformed_.inverse_from_log(log_tau), 1.0 / (dim_ - 1.0)));
}

double ExtremalSetup::psi(double t) const {
  if (t < 1.0) return std::pow(t, static_cast<double>(dim_));
  return t * phi_nm1(t);
}

ExtremalSetup normalize_gauge(const Gauge& raw, int dim,
                              std::optional<std::pair<double, double>> growth_ct) {
  if (dim < 2) throw std::invalid_argument("normalize_gauge: dim must be >= 2");
  const double root = 1.0 / (dim - 1.0);

  if (raw.bounded()) {
    throw std::invalid_argument("normalize_gauge: growth check failed at t = 1e6 (gauge " +
                                raw.describe() + " is bounded)");
  }

  const auto grid = geometric_grid(1.0, 1e6, 200);
  double C, T;
  if (growth_ct) {
    C = growth_ct->first;
    T = growth_ct->second;
    if (!(C > 0.0) || !(T > 0.0)) {
      throw std::invalid_argument("normalize_gauge: growth constants must be positive");
    }
    for (double t : grid) {
      if (t < T) continue;
      if (raw.log_eval(t) < std::log(C) + root * std::log(t) - 1e-12) {
        throw std::invalid_argument("normalize_gauge: growth check failed at t = " +
                                    std::to_string(t));
      }
    }
  } else {
    T = 1.0;
    C = kInf;
    for (double t : grid) {
      const double ratio = std::exp(raw.log_eval(t) - root * std::log(t));
      C = std::min(C, ratio);
    }
    if (!(C > 0.0)) {
      throw std::invalid_argument("normalize_gauge: growth check failed (fitted C is zero)");
    }
  }

  // Use the raw gauge directly when the powered lower bound already holds on
  // the sample range; otherwise apply the affine rescaling (1/C, max(T, 1)).
  auto powered_ok = [&](const Gauge& g) {
    if (!(g.eval(1.0) >= 1.0)) return false;
    for (double t : grid) {
      if (g.log_eval(std::pow(t, dim - 1.0)) < std::log(t) - 1e-12) return false;
    }
    return true;
  };

  ExtremalSetup setup;
  setup.raw_ = raw;
  setup.dim_ = dim;
  setup.growth_c_ = C;
  setup.growth_t_ = T;
  if (powered_ok(raw)) {
    setup.transformed_ = raw;
    setup.scale_ = 1.0;
    setup.shift_ = 0.0;
  } else {
    setup.scale_ = 1.0 / C;
    setup.shift_ = std::max(T, 1.0);
    setup.transformed_ = affine(raw, setup.scale_, setup.shift_);
    if (!powered_ok(setup.transformed_)) {
      throw std::invalid_argument(
          "normalize_gauge: powered lower bound fails even after the affine rescaling");
    }
  }
  setup.gamma_ = std::sqrt(setup.transformed_.eval(1.0));
  if (!(setup.gamma_ >= 1.0)) {
    throw std::invalid_argument("normalize_gauge: gamma must be >= 1");
  }
  return setup;
}

// ---------------------------------------------------------------------------

struct RadialProfile::Core {
  ExtremalSetup setup;
  double root_tol = 1e-12;
  std::vector<std::pair<double, double>> samples;
  mutable std::once_flag i0_once;
  mutable double i0 = 0.0;
  mutable std::string i0_error;

  double solve_k(double r) const {
    const double gamma = setup.gamma();
    const double target = std::pow(gamma / r, 2.0);
    return solve_monotone([this](double t) { return setup.psi(t); }, target,
                          BracketHint{1.0, std::max(2.0, gamma / r)}, root_tol);
  }

  // decreasing majorant for 1/K(e^{-s}) from the profile's lower sandwich wall
  double majorant(double s) const {
    const double inv = setup.phi_nm1_inverse_from_log(std::log(setup.gamma()) + s);
    return inv <= 0.0 ? kInf : 1.0 / inv;
  }

  // upper bound for the tail integral of 1/K(e^{-s}) beyond s by a unit-step sum
  double tail_bound(double s) const {
    double sum = 0.0;
    for (int j = 0; j < 20000; ++j) {
      const double term = majorant(s + j);
      sum += term;
      if (term < 1e-17 * std::max(sum, 1e-300)) return sum;
    }
    return kInf;
  }

  double integral_of_inverse_k(double s_lo, double s_hi) const {
    if (s_hi <= s_lo) return 0.0;
    return integrate_1d([this](double s) { return 1.0 / solve_k(std::exp(-s)); }, s_lo, s_hi,
                        1e-12);
  }

  double compute_i0() const {
    double acc = 0.0;
    double s = 0.0;
    while (s < 350.0) {
      const double step = 4.0;
      acc += integral_of_inverse_k(s, s + step);
      s += step;
      const double tail = tail_bound(s);
      if (tail < std::max(1e-13, 1e-12 * acc)) return acc;
    }
    throw NumericError(
        "profile integral: the tail of 1/(r K(r)) did not fall below tolerance within the "
        "representable range; the inverse-gauge tail integral appears divergent for this setup",
        acc);
  }

  double i0_value() const {
    std::call_once(i0_once, [this] {
      try {
        i0 = compute_i0();
      } catch (const NumericError& e) {
        i0_error = e.what();
        i0 = e.partial();
      }
    });
    if (!i0_error.empty()) throw NumericError(i0_error, i0);
    return i0;
  }
};

const ExtremalSetup& RadialProfile::setup() const { return core_->setup; }

const std::vector<std::pair<double, double>>& RadialProfile::samples() const {
  return core_->samples;
}

double RadialProfile::K_untruncated(double r) const {
  if (!(r > 0.0 && r <= 1.0)) {
    throw std::domain_error("RadialProfile::K: radius must lie in (0, 1]");
  }
  return core_->solve_k(r);
}

double RadialProfile::K(double r) const {
  if (m_ && r < 1.0 / *m_) return core_->solve_k(1.0 / *m_);
  return K_untruncated(r);
}

double RadialProfile::I0() const { return core_->i0_value(); }

double RadialProfile::I(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("RadialProfile::I: t must lie in [0, 1]");
  if (t == 1.0) return 0.0;
  if (!m_) {
    if (t == 0.0) return I0();
    return core_->integral_of_inverse_k(0.0, std::log(1.0 / t));
  }
  const double rm = 1.0 / *m_;
  if (t >= rm) return core_->integral_of_inverse_k(0.0, std::log(1.0 / t));
  if (t == 0.0) return kInf;
  const double km = core_->solve_k(rm);
  return core_->integral_of_inverse_k(0.0, std::log(1.0 / rm)) + std::log(rm / t) / km;
}

double RadialProfile::R(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("RadialProfile::R: t must lie in [0, 1]");
  const double i0 = I0();
  if (!m_) {
    if (t == 0.0) return 1.0;  // limit value of the untruncated map
    return std::exp(i0 - I(t));
  }
  const double rm = 1.0 / *m_;
  if (t >= rm) return std::exp(i0 - I(t));
  const double km = core_->solve_k(rm);
  const double r_at_rm = std::exp(i0 - I(rm));
  return r_at_rm * std::pow(t / rm, 1.0 / km);  // 0 at t = 0
}

RadialProfile solve_profile(const ExtremalSetup& setup, const std::vector<double>& radii,
                            double root_tol) {
  if (radii.empty()) throw std::invalid_argument("solve_profile: empty radius grid");
  auto core = std::make_shared<RadialProfile::Core>();
  core->setup = setup;
  core->root_tol = root_tol;

  const double gamma = setup.gamma();
  double prev_r = 0.0;
  double prev_k = kInf;
  core->samples.reserve(radii.size());
  for (double r : radii) {
    if (!(r > 0.0 && r <= 1.0) || !(r > prev_r)) {
      throw std::invalid_argument("solve_profile: radii must be increasing inside (0, 1]");
    }
    const double k = core->solve_k(r);
    const double upper = gamma / r;
    const double lower = setup.phi_nm1_inverse(gamma / r);
    if (k > upper * (1.0 + 1e-9) || k < lower * (1.0 - 1e-9)) {
      throw NumericError("solve_profile: sandwich violated at r = " + std::to_string(r), k);
    }
    if (!(k < prev_k * (1.0 + 1e-12))) {
      throw NumericError("solve_profile: profile is not decreasing at r = " + std::to_string(r),
                         k);
    }
    prev_k = k;
    prev_r = r;
    core->samples.emplace_back(r, k);
  }
  // blow-up check near the inner edge
  const double r_min = radii.front();
  if (2.0 * r_min <= 1.0 && !(core->solve_k(r_min) > core->solve_k(2.0 * r_min))) {
    throw NumericError("solve_profile: no blow-up detected towards r = 0", 0.0);
  }

  RadialProfile profile;
  profile.core_ = std::move(core);
  return profile;
}

RadialProfile truncate_profile(const RadialProfile& profile, int m) {
  if (m < 1) throw std::invalid_argument("truncate_profile: m must be >= 1");
  RadialProfile out;
  out.core_ = profile.core_;
  out.m_ = m;
  return out;
}

double profile_integral(const RadialProfile& profile, double t) { return profile.I(t); }

RadialMapSample eval_map(const RadialProfile& profile, const Point& x) {
  if (x.is_infinity()) throw std::domain_error("eval_map: x must be finite");
  const int n = profile.setup().dim();
  if (x.dim() != n) throw std::invalid_argument("eval_map: dimension mismatch");
  const double t = x.norm();
  if (t >= 1.0) throw std::domain_error("eval_map: x must lie in the unit ball");
  const bool truncated = profile.truncation().has_value();
  if (!truncated && t == 0.0) {
    throw std::domain_error("eval_map: the untruncated map is defined on the punctured ball");
  }

  RadialMapSample s;
  s.x = x;
  if (t == 0.0) {
    s.image = Point::origin(n);
    const double km = profile.K(0.5 / *profile.truncation());
    s.tangent_distortion = km == 1.0 ? profile.R(1.0 / *profile.truncation()) *
                                           static_cast<double>(*profile.truncation())
                                     : kInf;
    s.radial_distortion = s.tangent_distortion;
    s.inner_dilatation = std::pow(km, n - 1.0);
    return s;
  }
  const double rt = profile.R(t);
  s.image = (rt / t) * x;
  const double k = profile.K(t);
  s.tangent_distortion = rt / t;
  s.radial_distortion = rt / (t * k);
  s.inner_dilatation = std::pow(s.tangent_distortion / s.radial_distortion, n - 1.0);
  return s;
}

GaugeMass gauge_mass(const RadialProfile& profile, double rel_tol) {
  const ExtremalSetup& setup = profile.setup();
  const int n = setup.dim();
  const auto dc = DimensionConstants::make(n);
  const double gamma = setup.gamma();
  const double i0 = profile.I0();
  const double bound = gamma * gamma * dc.sphere_area * i0;

  auto density = [&](double s) {
    // phi_{n-1}(K(e^{-s})) e^{-ns}, evaluated from the solved profile
    const double k = profile.K(std::exp(-s));
    return setup.phi_nm1(k) * std::exp(-n * s);
  };

  double mass = 0.0;
  if (profile.truncation()) {
    const int m = *profile.truncation();
    const double rm = 1.0 / m;
    const double km = profile.K(rm * 0.5);
    if (m > 1) {
      mass += dc.sphere_area * integrate_1d(density, 0.0, std::log(1.0 / rm), rel_tol);
    }
    mass += dc.sphere_area * setup.phi_nm1(km) * std::pow(rm, n) / n;
  } else {
    // tail controlled by the same majorant as the profile integral:
    // phi_{n-1}(K) e^{-ns} = gamma^2 e^{(2-n)s} / K <= gamma^2 majorant(s)
    double acc = 0.0;
    double s = 0.0;
    bool settled = false;
    while (s < 350.0) {
      acc += integrate_1d(density, s, s + 4.0, rel_tol);
      s += 4.0;
      double tail = 0.0;
      for (int j = 0; j < 20000; ++j) {
        const double inv = setup.phi_nm1_inverse_from_log(std::log(gamma) + s + j);
        const double term =
            gamma * gamma * std::exp((2.0 - n) * (s + j)) * (inv <= 0.0 ? kInf : 1.0 / inv);
        tail += term;
        if (term < 1e-17 * std::max(tail, 1e-300)) break;
        if (j == 19999) tail = kInf;
      }
      if (tail < std::max(1e-12, 1e-11 * acc)) {
        settled = true;
        break;
      }
    }
    if (!settled) {
      throw NumericError("gauge_mass: the radial mass integral did not settle", acc);
    }
    mass = dc.sphere_area * acc;
  }

  if (mass > bound + 1e-7 * std::max(1.0, bound)) {
    throw NumericError("gauge_mass: computed mass exceeds gamma^2 omega I0", mass);
  }
  return GaugeMass{mass, bound};
}

std::vector<WitnessRow> nonequicontinuity_witness(const RadialProfile& profile, double delta,
                                                  const std::vector<int>& m_list) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("nonequicontinuity_witness: delta must lie in (0, 1)");
  }
  for (int m : m_list) {
    if (m < 1.0 / delta) {
      throw std::invalid_argument("nonequicontinuity_witness: m = " + std::to_string(m) +
                                  " is below 1/delta = " + std::to_string(1.0 / delta));
    }
  }
  const int n = profile.setup().dim();

  // direction sample on the sphere |x| = delta (the map is radial; the sample
  // keeps the check honest rather than assuming symmetry)
  std::vector<Point> dirs;
  for (int axis = 0; axis < n; ++axis) {
    dirs.push_back(delta * Point::unit(n, axis));
    dirs.push_back(-delta * Point::unit(n, axis));
  }
  {
    std::vector<double> diag(static_cast<std::size_t>(n), delta / std::sqrt(double(n)));
    dirs.push_back(Point(diag));
  }

  std::vector<WitnessRow> rows;
  rows.reserve(m_list.size());
  for (int m : m_list) {
    const RadialProfile fm = truncate_profile(profile, m);
    double min_abs = kInf;
    Point arg = dirs.front();
    for (const Point& x : dirs) {
      const double a = eval_map(fm, x).image.norm();
      if (a < min_abs) {
        min_abs = a;
        arg = x;
      }
    }
    const Point at_zero = eval_map(fm, Point::origin(n)).image;
    WitnessRow row;
    row.delta = delta;
    row.m = m;
    row.min_abs_f = min_abs;
    row.chordal_osc = chordal_distance(eval_map(fm, arg).image, at_zero);
    row.separated = min_abs >= 1.0 - 1e-12;
    rows.push_back(row);
  }
  return rows;
}

BoundReport membership_check(const RadialProfile& profile, int m, double delta_report) {
  const RadialProfile fm = truncate_profile(profile, m);
  const int n = profile.setup().dim();
  const double i0 = profile.I0();
  const double image_radius = fm.R(1.0);

  // the radius map must climb from 0 at the origin up to e^{I0} at the boundary
  bool monotone = fm.R(0.0) == 0.0;
  double prev = 0.0;
  for (int j = 1; j <= 32; ++j) {
    const double t = static_cast<double>(j) / 32.0;
    const double r = fm.R(t);
    if (!(r > prev)) monotone = false;
    prev = r;
  }

  // chordal gap realized by the omitted set {|y| >= image_radius} + infinity
  std::vector<Point> omitted;
  omitted.push_back(Point::infinity(n));
  for (double scale : {1.0, 2.0, 10.0}) {
    for (int axis = 0; axis < n; ++axis) {
      omitted.push_back(scale * image_radius * Point::unit(n, axis));
      omitted.push_back(-scale * image_radius * Point::unit(n, axis));
    }
  }
  const double realized_gap = chordal_diameter(omitted);
  const double gap_to_infinity = 1.0 / std::sqrt(1.0 + image_radius * image_radius);

  const GaugeMass gm = gauge_mass(fm);

  BoundReport rep;
  rep.lhs = gm.mass;
  rep.rhs = gm.bound;
  rep.bound_value = realized_gap;
  rep.tolerance = 1e-7;
  rep.verdict = monotone && gm.mass <= gm.bound + 1e-7 * std::max(1.0, gm.bound) &&
                std::abs(image_radius - std::exp(i0)) <= 1e-9 * std::exp(i0) &&
                realized_gap >= delta_report;
  rep.inputs = {{"m", static_cast<double>(m)},
                {"image_radius", image_radius},
                {"exp_I0", std::exp(i0)},
                {"realized_gap", realized_gap},
                {"gap_to_infinity", gap_to_infinity},
                {"delta_requested", delta_report}};
  rep.note = "omitted-set gap sampled over boundary and far points";
  return rep;
}

}  // namespace qcmean
