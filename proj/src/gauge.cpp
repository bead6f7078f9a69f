#include "qcmean/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qcmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

/// Smallest t with pred monotone-in-t turning true; +inf if it never does.
/// pred must be false at 0 when called.
double monotone_switch_point(const std::function<bool(double)>& pred) {
  double hi = 1.0;
  double lo = 0.0;
  int guard = 0;
  while (!pred(hi)) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 1100 || hi > 1e300) return kInf;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (pred(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-14 * std::max(1.0, hi)) break;
  }
  return hi;
}

}  // namespace

struct Gauge::Node {
  Family family = Family::Identity;
  double a = 0.0;  // power: c | exp: beta | logpower: alpha | constant: c | affine: scale
  double b = 0.0;  // power: alpha | exp: q | logpower: beta | affine: shift
  std::vector<std::pair<double, double>> pts;
  std::shared_ptr<const Node> inner;
};

Gauge::Gauge(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

Gauge Gauge::identity() {
  auto n = std::make_shared<Node>();
  n->family = Family::Identity;
  return Gauge(n);
}

Gauge Gauge::constant(double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("Gauge::constant: c must be >= 0");
  auto n = std::make_shared<Node>();
  n->family = Family::Constant;
  n->a = c;
  return Gauge(n);
}

Gauge Gauge::power(double c, double alpha) {
  if (!(c > 0.0)) throw std::invalid_argument("Gauge::power: c must be > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("Gauge::power: alpha must be > 0");
  auto n = std::make_shared<Node>();
  n->family = Family::Power;
  n->a = c;
  n->b = alpha;
  return Gauge(n);
}

Gauge Gauge::exp_power(double beta, double q) {
  if (!(beta > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("Gauge::exp_power: beta and q must be > 0");
  }
  auto n = std::make_shared<Node>();
  n->family = Family::Exp;
  n->a = beta;
  n->b = q;
  return Gauge(n);
}

Gauge Gauge::log_power(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta > 0.0)) {
    throw std::invalid_argument("Gauge::log_power: need alpha, beta >= 0, not both zero");
  }
  auto n = std::make_shared<Node>();
  n->family = Family::LogPower;
  n->a = alpha;
  n->b = beta;
  return Gauge(n);
}

Gauge Gauge::table(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("Gauge::table: empty breakpoint list");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first >= 0.0) || !(points[i].second >= 0.0)) {
      throw std::invalid_argument("Gauge::table: breakpoints must be non-negative");
    }
    if (i > 0) {
      if (points[i].first < points[i - 1].first) {
        throw std::invalid_argument("Gauge::table: abscissae must be non-decreasing");
      }
      if (points[i].second < points[i - 1].second) {
        throw std::invalid_argument("Gauge::table: values must be non-decreasing");
      }
    }
  }
  auto n = std::make_shared<Node>();
  n->family = Family::Table;
  n->pts = std::move(points);
  return Gauge(n);
}

Gauge Gauge::affine(double scale, double shift, Gauge inner) {
  if (!(scale > 0.0)) throw std::invalid_argument("Gauge::affine: scale must be > 0");
  if (!(shift >= 0.0)) throw std::invalid_argument("Gauge::affine: shift must be >= 0");
  auto n = std::make_shared<Node>();
  n->family = Family::Affine;
  n->a = scale;
  n->b = shift;
  n->inner = inner.node_;
  return Gauge(n);
}

Gauge affine(const Gauge& g, double scale, double shift) {
  return Gauge::affine(scale, shift, g);
}

Gauge::Family Gauge::family() const { return node_->family; }

double Gauge::eval(double t) const {
  const Node& n = *node_;
  if (std::isnan(t)) throw std::invalid_argument("Gauge::eval: t is NaN");
  if (t < 0.0) throw std::invalid_argument("Gauge::eval: t must be in [0, infinity]");
  switch (n.family) {
    case Family::Identity:
      return t;
    case Family::Constant:
      return n.a;
    case Family::Power:
      return std::isinf(t) ? kInf : n.a * std::pow(t, n.b);
    case Family::Exp: {
      if (std::isinf(t)) return kInf;
      return std::exp(n.a * std::pow(t, n.b));
    }
    case Family::LogPower: {
      if (std::isinf(t)) return kInf;
      const double lg = std::log(std::numbers::e + t);
      return std::pow(t, n.a) * std::pow(lg, n.b);
    }
    case Family::Table: {
      const auto& pts = n.pts;
      if (std::isinf(t)) return pts.back().second;
      if (t <= pts.front().first) {
        // right-continuous value at the first abscissa
        double v = pts.front().second;
        if (t == pts.front().first) {
          for (std::size_t i = 1; i < pts.size() && pts[i].first == t; ++i) v = pts[i].second;
        }
        return v;
      }
      if (t >= pts.back().first) return pts.back().second;
      // last index with abscissa <= t
      std::size_t i = 0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (pts[j].first <= t) i = j;
      }
      if (pts[i].first == t) return pts[i].second;
      const auto& [t0, v0] = pts[i];
      const auto& [t1, v1] = pts[i + 1];
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
    case Family::Affine:
      return n.a * Gauge(n.inner).eval(t) + n.b;
  }
  return 0.0;
}

double Gauge::log_eval(double t) const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
      return t == 0.0 ? kNegInf : std::log(t);
    case Family::Constant:
      return n.a == 0.0 ? kNegInf : std::log(n.a);
    case Family::Power:
      if (t == 0.0) return kNegInf;
      if (std::isinf(t)) return kInf;
      return std::log(n.a) + n.b * std::log(t);
    case Family::Exp:
      return std::isinf(t) ? kInf : n.a * std::pow(t, n.b);
    case Family::LogPower: {
      if (std::isinf(t)) return kInf;
      if (t == 0.0) return n.a > 0.0 ? kNegInf : 0.0;
      return n.a * std::log(t) + n.b * std::log(std::log(std::numbers::e + t));
    }
    case Family::Table: {
      const double v = eval(t);
      return v == 0.0 ? kNegInf : std::log(v);
    }
    case Family::Affine: {
      const double inner_log = Gauge(n.inner).log_eval(t);
      if (std::isinf(inner_log) && inner_log > 0.0) return kInf;
      const double lb = n.b == 0.0 ? kNegInf : std::log(n.b);
      const double la = inner_log == kNegInf ? kNegInf : std::log(n.a) + inner_log;
      if (la == kNegInf) return lb;
      if (lb == kNegInf) return la;
      const double m = std::max(la, lb);
      return m + std::log1p(std::exp(std::min(la, lb) - m));
    }
  }
  return kNegInf;
}

double Gauge::log_derivative(double t) const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
      return t == 0.0 ? kInf : 1.0 / t;
    case Family::Constant:
      return 0.0;
    case Family::Power:
      return t == 0.0 ? kInf : n.b / t;
    case Family::Exp:
      return n.a * n.b * std::pow(t, n.b - 1.0);
    case Family::LogPower: {
      if (t == 0.0) return n.a > 0.0 ? kInf : n.b / std::numbers::e;
      const double lg = std::log(std::numbers::e + t);
      return n.a / t + n.b / ((std::numbers::e + t) * lg);
    }
    case Family::Table: {
      const auto& pts = n.pts;
      if (t >= pts.back().first || t < pts.front().first) return 0.0;
      std::size_t i = 0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (pts[j].first <= t) i = j;
      }
      // derivative of the segment to the right of t (a.c. part only)
      while (i + 1 < pts.size() && pts[i + 1].first == pts[i].first) ++i;
      if (i + 1 >= pts.size()) return 0.0;
      const double dt = pts[i + 1].first - pts[i].first;
      const double dv = pts[i + 1].second - pts[i].second;
      if (dt <= 0.0 || dv == 0.0) return 0.0;
      const double value = eval(t);
      return value == 0.0 ? kInf : (dv / dt) / value;
    }
    case Family::Affine: {
      const Gauge inner(n.inner);
      const double l = inner.log_eval(t);
      if (l == kNegInf) return 0.0;
      const double ld = inner.log_derivative(t);
      if (n.b == 0.0) return ld;
      const double w = (n.b / n.a) * std::exp(-l);
      if (std::isinf(w)) return ld * (n.a / n.b) * std::exp(l);
      return ld / (1.0 + w);
    }
  }
  return 0.0;
}

double Gauge::inverse(double tau) const {
  const Node& n = *node_;
  if (std::isnan(tau)) throw std::invalid_argument("Gauge::inverse: tau is NaN");
  if (tau <= 0.0) return 0.0;
  switch (n.family) {
    case Family::Identity:
      return tau;
    case Family::Constant:
      return tau <= n.a ? 0.0 : kInf;
    case Family::Power:
      return std::isinf(tau) ? kInf : std::pow(tau / n.a, 1.0 / n.b);
    case Family::Exp:
      if (std::isinf(tau)) return kInf;
      if (tau <= 1.0) return 0.0;
      return std::pow(std::log(tau) / n.a, 1.0 / n.b);
    case Family::LogPower: {
      if (std::isinf(tau)) return kInf;
      if (eval(0.0) >= tau) return 0.0;
      return monotone_switch_point([&](double t) { return eval(t) >= tau; });
    }
    case Family::Table: {
      const auto& pts = n.pts;
      if (tau > pts.back().second) return kInf;
      // first breakpoint value reaching tau (values are sorted), then invert
      // the segment in closed form
      const std::size_t j = static_cast<std::size_t>(
          std::lower_bound(pts.begin(), pts.end(), tau,
                           [](const std::pair<double, double>& pt, double v) {
                             return pt.second < v;
                           }) -
          pts.begin());
      if (j == 0) return 0.0;
      const auto& [t0, v0] = pts[j - 1];
      const auto& [t1, v1] = pts[j];
      if (t1 == t0 || v1 == v0) return t1;
      const double t = t0 + (tau - v0) * (t1 - t0) / (v1 - v0);
      // values left of the first abscissa are constant v_front
      return std::max(t, 0.0);
    }
    case Family::Affine:
      return Gauge(n.inner).inverse((tau - n.b) / n.a);
  }
  return 0.0;
}

double Gauge::inverse_from_log(double log_tau) const {
  const Node& n = *node_;
  if (log_tau == kNegInf) return 0.0;
  switch (n.family) {
    case Family::Identity:
      return std::exp(log_tau);
    case Family::Constant:
      return (n.a > 0.0 && log_tau <= std::log(n.a)) ? 0.0 : kInf;
    case Family::Power:
      if (log_tau == kInf) return kInf;
      return std::exp((log_tau - std::log(n.a)) / n.b);
    case Family::Exp:
      if (log_tau == kInf) return kInf;
      if (log_tau <= 0.0) return 0.0;
      return std::pow(log_tau / n.a, 1.0 / n.b);
    case Family::LogPower: {
      if (log_tau == kInf) return kInf;
      if (log_eval(0.0) >= log_tau) return 0.0;
      return monotone_switch_point([&](double t) { return log_eval(t) >= log_tau; });
    }
    case Family::Table:
      return inverse(std::exp(log_tau));
    case Family::Affine: {
      if (log_tau == kInf) return Gauge(n.inner).inverse(kInf);
      const double tau = std::exp(log_tau);
      if (std::isfinite(tau)) return Gauge(n.inner).inverse((tau - n.b) / n.a);
      // (e^l - b)/a in the log domain for very large l
      return Gauge(n.inner).inverse_from_log(log_tau - std::log(n.a));
    }
  }
  return 0.0;
}

double Gauge::value_at_zero() const { return eval(0.0); }

double Gauge::value_at_zero_plus() const {
  // gauges here are right-continuous at 0
  return eval(0.0);
}

double Gauge::zero_plateau_end() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
    case Family::Power:
    case Family::Exp:
    case Family::LogPower:
      return 0.0;
    case Family::Constant:
      return n.a > 0.0 ? 0.0 : kInf;
    case Family::Table: {
      if (n.pts.back().second == 0.0) return kInf;
      double t0 = 0.0;
      for (const auto& [t, v] : n.pts) {
        if (v == 0.0) t0 = t;
      }
      return t0;
    }
    case Family::Affine:
      return n.b > 0.0 ? 0.0 : Gauge(n.inner).zero_plateau_end();
  }
  return 0.0;
}

double Gauge::initial_plateau_end() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
    case Family::Power:
    case Family::Exp:
    case Family::LogPower:
      return 0.0;
    case Family::Constant:
      return kInf;
    case Family::Table: {
      const double v0 = eval(0.0);
      if (n.pts.back().second == v0) return kInf;
      double t = 0.0;
      for (const auto& [tp, vp] : n.pts) {
        if (vp <= v0) t = tp;
      }
      return t;
    }
    case Family::Affine:
      return Gauge(n.inner).initial_plateau_end();
  }
  return 0.0;
}

double Gauge::sup_value() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
    case Family::Power:
    case Family::Exp:
    case Family::LogPower:
      return kInf;
    case Family::Constant:
      return n.a;
    case Family::Table:
      return n.pts.back().second;
    case Family::Affine: {
      const double s = Gauge(n.inner).sup_value();
      return std::isinf(s) ? kInf : n.a * s + n.b;
    }
  }
  return kInf;
}

bool Gauge::bounded() const { return std::isfinite(sup_value()); }

std::vector<double> Gauge::jump_points() const {
  const Node& n = *node_;
  if (n.family == Family::Affine) return Gauge(n.inner).jump_points();
  std::vector<double> out;
  if (n.family != Family::Table) return out;
  for (std::size_t i = 1; i < n.pts.size(); ++i) {
    if (n.pts[i].first == n.pts[i - 1].first && n.pts[i].second > n.pts[i - 1].second) {
      out.push_back(n.pts[i].first);
    }
  }
  return out;
}

Gauge::GrowthClass Gauge::growth_class() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
      return {GrowthClass::Kind::PolyLog, 1.0};
    case Family::Power:
      return {GrowthClass::Kind::PolyLog, n.b};
    case Family::Exp:
      return {GrowthClass::Kind::ExpPower, n.b};
    case Family::LogPower:
      return n.a > 0.0 ? GrowthClass{GrowthClass::Kind::PolyLog, n.a}
                       : GrowthClass{GrowthClass::Kind::LogOnly, 0.0};
    case Family::Constant:
    case Family::Table:
      return {GrowthClass::Kind::Bounded, 0.0};
    case Family::Affine:
      return Gauge(n.inner).growth_class();
  }
  return {GrowthClass::Kind::Bounded, 0.0};
}

std::string Gauge::describe() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::Identity:
      return "identity";
    case Family::Constant:
      return "constant(c=" + fmt(n.a) + ")";
    case Family::Power:
      return "power(c=" + fmt(n.a) + ",alpha=" + fmt(n.b) + ")";
    case Family::Exp:
      return "exp(beta=" + fmt(n.a) + ",q=" + fmt(n.b) + ")";
    case Family::LogPower:
      return "logpower(alpha=" + fmt(n.a) + ",beta=" + fmt(n.b) + ")";
    case Family::Table:
      return "table(" + std::to_string(n.pts.size()) + " points)";
    case Family::Affine:
      return fmt(n.a) + "*" + Gauge(n.inner).describe() + "+" + fmt(n.b);
  }
  return "?";
}

// ---------------------------------------------------------------------------

PoweredGauge::PoweredGauge(Gauge base, double p) : base_(std::move(base)), p_(p) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("PoweredGauge: p must be positive and finite");
  }
}

double PoweredGauge::eval(double t) const { return base_.eval(std::pow(t, p_)); }

double PoweredGauge::log_eval(double t) const { return base_.log_eval(std::pow(t, p_)); }

double PoweredGauge::h_derivative(double t) const {
  if (t <= zero_plateau_end()) return 0.0;
  return p_ * std::pow(t, p_ - 1.0) * base_.log_derivative(std::pow(t, p_));
}

double PoweredGauge::inverse(double tau) const { return std::pow(base_.inverse(tau), 1.0 / p_); }

double PoweredGauge::h_inverse(double eta) const {
  return std::pow(base_.inverse_from_log(eta), 1.0 / p_);
}

double PoweredGauge::value_at_zero() const { return base_.value_at_zero(); }

double PoweredGauge::value_at_zero_plus() const { return base_.value_at_zero_plus(); }

double PoweredGauge::zero_plateau_end() const {
  const double t0 = base_.zero_plateau_end();
  if (t0 == 0.0) return 0.0;
  return std::pow(t0, 1.0 / p_);
}

Gauge::GrowthClass PoweredGauge::growth_class() const {
  Gauge::GrowthClass c = base_.growth_class();
  if (c.kind == Gauge::GrowthClass::Kind::PolyLog ||
      c.kind == Gauge::GrowthClass::Kind::ExpPower) {
    c.exponent *= p_;
  }
  return c;
}

// ---------------------------------------------------------------------------

std::string to_string(ConditionId c) {
  switch (c) {
    case ConditionId::DerivLog: return "deriv-log";
    case ConditionId::StieltjesLog: return "stieltjes-log";
    case ConditionId::LogOverT2: return "log-over-t2";
    case ConditionId::LogRecip: return "log-recip";
    case ConditionId::InvH: return "inv-h";
    case ConditionId::InvPhi: return "inv-phi";
    case ConditionId::InvRoot: return "inv-root";
    case ConditionId::LogGaugeNPrime: return "log-gauge-nprime";
  }
  return "?";
}

std::vector<ConditionId> all_conditions() {
  return {ConditionId::DerivLog, ConditionId::StieltjesLog, ConditionId::LogOverT2,
          ConditionId::LogRecip, ConditionId::InvH,         ConditionId::InvPhi,
          ConditionId::InvRoot,  ConditionId::LogGaugeNPrime};
}

namespace {

void check_condition_delta(const Gauge& g, const PoweredGauge& gp, ConditionId cond,
                           double delta) {
  if (!std::isfinite(delta)) {
    throw std::invalid_argument("classify_condition: delta must be finite");
  }
  // the log-inverse form lives on the eta axis and admits negative limits when
  // H_p(0+) = -infinity; every other condition needs a positive limit
  if (cond != ConditionId::InvH && !(delta > 0.0)) {
    throw std::invalid_argument("classify_condition: delta must be positive");
  }
  switch (cond) {
    case ConditionId::DerivLog:
    case ConditionId::StieltjesLog:
    case ConditionId::LogOverT2: {
      const double t0 = gp.zero_plateau_end();
      if (!(delta > t0)) {
        throw std::invalid_argument("classify_condition(" + to_string(cond) +
                                    "): delta must exceed the zero-plateau end t0 = " + fmt(t0));
      }
      break;
    }
    case ConditionId::LogRecip: {
      const double t0 = gp.zero_plateau_end();
      if (t0 > 0.0 && !(delta < 1.0 / t0)) {
        throw std::invalid_argument(
            "classify_condition(log-recip): upper limit must stay below 1/t0 = " +
            fmt(1.0 / t0));
      }
      break;
    }
    case ConditionId::InvH: {
      const double v0 = gp.value_at_zero_plus();
      const double h0 = v0 == 0.0 ? kNegInf : std::log(v0);
      if (!(delta > h0)) {
        throw std::invalid_argument("classify_condition(inv-h): delta must exceed H_p(0+) = " +
                                    fmt(h0));
      }
      break;
    }
    case ConditionId::InvPhi: {
      const double v0 = gp.value_at_zero_plus();
      if (!(delta > v0)) {
        throw std::invalid_argument("classify_condition(inv-phi): delta must exceed phi(0+) = " +
                                    fmt(v0));
      }
      break;
    }
    case ConditionId::InvRoot: {
      const double tau0 = g.value_at_zero();
      if (!(delta > tau0)) {
        throw std::invalid_argument("classify_condition(inv-root): delta must exceed phi(0) = " +
                                    fmt(tau0));
      }
      break;
    }
    case ConditionId::LogGaugeNPrime: {
      const double t0 = g.zero_plateau_end();
      if (!(delta > t0)) {
        throw std::invalid_argument(
            "classify_condition(log-gauge-nprime): delta must exceed t0 = " + fmt(t0));
      }
      break;
    }
  }
}

DivergenceVerdict closed_form_verdict(const Gauge::GrowthClass& cls) {
  DivergenceVerdict v;
  v.method = "closed-form";
  switch (cls.kind) {
    case Gauge::GrowthClass::Kind::Bounded:
      v.kind = Divergence::Converges;
      v.detail = "bounded gauge";
      return v;
    case Gauge::GrowthClass::Kind::LogOnly:
      v.kind = Divergence::Converges;
      v.detail = "log-scale gauge growth";
      return v;
    case Gauge::GrowthClass::Kind::PolyLog:
      v.kind = Divergence::Converges;
      v.detail = "power-scale gauge growth (exponent " + fmt(cls.exponent) + ")";
      return v;
    case Gauge::GrowthClass::Kind::ExpPower:
      v.kind = cls.exponent >= 1.0 ? Divergence::Diverges : Divergence::Converges;
      v.detail = "exponential gauge growth, log phi_p ~ t^" + fmt(cls.exponent);
      return v;
  }
  return v;
}

}  // namespace

DivergenceVerdict classify_condition(const Gauge& g, double p, ConditionId cond, double delta,
                                     const DivergencePolicy& policy) {
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("classify_condition: p must be positive and finite");
  }
  PoweredGauge gp(g, p);
  check_condition_delta(g, gp, cond, delta);

  if (!policy.force_numeric) {
    DivergenceVerdict v = closed_form_verdict(gp.growth_class());
    v.detail = to_string(cond) + ": " + v.detail;
    return v;
  }

  // Numeric evidence route. The head of each integral below any fixed point is
  // finite under the delta preconditions, so trimming to where the integrand is
  // non-negative does not change the verdict.
  IntegrandSpec spec;
  double lower = delta;
  switch (cond) {
    case ConditionId::DerivLog:
    case ConditionId::StieltjesLog:
      spec.f = [gp](double t) { return gp.h_derivative(t) / t; };
      spec.label = to_string(cond);
      break;
    case ConditionId::LogOverT2:
    case ConditionId::LogRecip: {
      if (cond == ConditionId::LogRecip) lower = 1.0 / delta;
      const double t_pos = gp.inverse(1.0);
      if (std::isinf(t_pos)) {
        DivergenceVerdict v;
        v.kind = Divergence::Converges;
        v.method = "partial-integrals";
        v.detail = to_string(cond) + ": gauge stays below 1, log-gauge tail is non-positive";
        v.evidence.emplace_back(lower, 0.0);
        return v;
      }
      lower = std::max(lower, t_pos * (1.0 + 1e-12));
      spec.f = [gp](double t) { return std::max(0.0, gp.log_eval(t)) / (t * t); };
      spec.label = to_string(cond);
      break;
    }
    case ConditionId::InvH:
      // the head above H_p(0+) is finite, so a positive start keeps the verdict
      lower = std::max(lower, 1.0);
      spec.f = [gp](double eta) {
        const double h = gp.h_inverse(eta);
        return std::isinf(h) ? 0.0 : 1.0 / h;
      };
      spec.label = "inv-h";
      break;
    case ConditionId::InvPhi:
      spec.f = [gp](double tau) {
        const double inv = gp.inverse(tau);
        return std::isinf(inv) ? 0.0 : 1.0 / (tau * inv);
      };
      spec.label = "inv-phi";
      break;
    case ConditionId::InvRoot:
      spec.f = [g, p](double tau) {
        const double root = std::pow(g.inverse(tau), 1.0 / p);
        return std::isinf(root) ? 0.0 : 1.0 / (tau * root);
      };
      spec.label = "inv-root";
      break;
    case ConditionId::LogGaugeNPrime: {
      const double nprime = (p + 1.0) / p;
      const double t_pos = g.inverse(1.0);
      if (std::isinf(t_pos)) {
        DivergenceVerdict v;
        v.kind = Divergence::Converges;
        v.method = "partial-integrals";
        v.detail = "log-gauge-nprime: gauge stays below 1";
        v.evidence.emplace_back(lower, 0.0);
        return v;
      }
      lower = std::max(lower, t_pos * (1.0 + 1e-12));
      spec.f = [g, nprime](double t) {
        return std::max(0.0, g.log_eval(t)) / std::pow(t, nprime);
      };
      spec.label = "log-gauge-nprime";
      break;
    }
  }

  DivergenceVerdict v = classify_divergence(spec, lower, {}, policy);
  if (cond == ConditionId::StieltjesLog) {
    // absolutely continuous part plus the jump sum
    double jumps = 0.0;
    int count = 0;
    for (double tj_base : g.jump_points()) {
      const double tj = std::pow(tj_base, 1.0 / p);
      if (tj < delta) continue;
      const double before = gp.log_eval(tj * (1.0 - 1e-12));
      const double after = gp.log_eval(tj);
      if (after > before) {
        jumps += (after - before) / tj;
        ++count;
      }
    }
    if (count > 0) {
      v.detail += "; jump contribution " + fmt(jumps) + " over " + std::to_string(count) +
                  " breakpoints";
    }
  }
  return v;
}

double default_condition_delta(const Gauge& g, double p, ConditionId cond) {
  PoweredGauge gp(g, p);
  switch (cond) {
    case ConditionId::DerivLog:
    case ConditionId::StieltjesLog:
    case ConditionId::LogOverT2: {
      const double t0 = gp.zero_plateau_end();
      if (std::isinf(t0)) {
        throw std::invalid_argument("default_condition_delta: gauge vanishes identically");
      }
      return std::max(std::numbers::e, 1.5 * t0 + 0.5);
    }
    case ConditionId::LogRecip: {
      const double t0 = gp.zero_plateau_end();
      if (std::isinf(t0)) {
        throw std::invalid_argument("default_condition_delta: gauge vanishes identically");
      }
      return t0 > 0.0 ? 0.5 / t0 : 1.0;
    }
    case ConditionId::InvH: {
      const double v0 = gp.value_at_zero_plus();
      const double h0 = v0 == 0.0 ? kNegInf : std::log(v0);
      return std::isfinite(h0) ? std::max(1.0, h0 + 1.0) : 1.0;
    }
    case ConditionId::InvPhi: {
      const double v0 = gp.value_at_zero_plus();
      return std::max(std::numbers::e, v0 + std::max(1.0, 0.5 * v0));
    }
    case ConditionId::InvRoot: {
      const double tau0 = g.value_at_zero();
      if (std::isinf(tau0)) {
        throw std::invalid_argument("default_condition_delta: gauge is identically infinite");
      }
      return std::max(std::numbers::e, tau0 + std::max(1.0, 0.5 * tau0));
    }
    case ConditionId::LogGaugeNPrime: {
      const double t0 = g.zero_plateau_end();
      if (std::isinf(t0)) {
        throw std::invalid_argument("default_condition_delta: gauge vanishes identically");
      }
      return std::max(std::numbers::e, 1.5 * t0 + 0.5);
    }
  }
  return std::numbers::e;
}

std::pair<DivergenceVerdict, DivergenceVerdict> weakest_p_note(const Gauge& g, double p1,
                                                               double p2, ConditionId cond,
                                                               std::optional<double> delta) {
  if (!(p1 < p2)) throw std::invalid_argument("weakest_p_note: need p1 < p2");
  const double d1 = delta ? *delta : default_condition_delta(g, p1, cond);
  const double d2 = delta ? *delta : default_condition_delta(g, p2, cond);
  return {classify_condition(g, p1, cond, d1), classify_condition(g, p2, cond, d2)};
}

InverseEvalBound inverse_of_eval_bound(const Gauge& g, double t) {
  // log-domain evaluation keeps exponential gauges from overflowing
  const double lhs = g.inverse_from_log(g.log_eval(t));
  const bool ok = lhs <= t + 1e-12 * std::max(1.0, t);
  return {lhs, t, ok};
}

bool strictly_increasing_at(const Gauge& g, double t) {
  const double h = 1e-8 * std::max(1.0, t);
  return g.eval(t + h) > g.eval(t);
}

bool slope_is_nondecreasing(const Gauge& g, const std::vector<double>& sample) {
  if (sample.empty()) throw std::invalid_argument("slope_is_nondecreasing: empty sample");
  const double phi0 = g.eval(0.0);
  double prev = kNegInf;
  double prev_t = 0.0;
  for (double t : sample) {
    if (!(t > prev_t)) {
      throw std::invalid_argument("slope_is_nondecreasing: sample must be strictly increasing and positive");
    }
    prev_t = t;
    const double s = (g.eval(t) - phi0) / t;
    if (std::isinf(s) && s > 0.0) {
      if (std::isinf(prev) && prev > 0.0) continue;
      prev = s;
      continue;
    }
    if (std::isinf(prev) && prev > 0.0) return false;
    if (prev != kNegInf && s < prev - 1e-12 * std::max(1.0, std::abs(prev))) return false;
    prev = s;
  }
  return true;
}

}  // namespace qcmean
