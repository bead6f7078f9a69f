#include "qcmean/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "qcmean/numerics.hpp"

namespace qcmean {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

/// Schedule eps_k = 2^{-k}; indices of the k's closest to whole decades of eps.
std::vector<int> decade_marks(int decades) {
  std::vector<int> ks;
  const double log2_10 = std::log2(10.0);
  for (int d = 1; d <= decades; ++d) {
    ks.push_back(static_cast<int>(std::ceil(d * log2_10)));
  }
  return ks;
}

DivergenceVerdict schedule_verdict(const std::function<double(double)>& partial_at_eps,
                                   const DivergencePolicy& policy) {
  DivergenceVerdict v;
  v.method = "partial-integrals";
  const auto marks = decade_marks(policy.k_max);
  double prev = partial_at_eps(0.5);
  std::vector<double> increments;
  for (int k : marks) {
    const double eps = std::pow(2.0, -k);
    const double s = partial_at_eps(eps);
    if (std::isinf(s)) {
      v.kind = Divergence::Diverges;
      v.detail = "partial integral infinite already at eps = " + std::to_string(eps);
      v.evidence.emplace_back(1.0 / eps, s);
      return v;
    }
    increments.push_back(s - prev);
    v.evidence.emplace_back(1.0 / eps, s);
    prev = s;
  }
  const int trailing = policy.trailing_decades;
  bool all_grow = true;
  double tail_sum = 0.0;
  for (int i = 0; i < trailing; ++i) {
    const double inc = increments[increments.size() - 1 - static_cast<std::size_t>(i)];
    if (inc < policy.growth_per_decade) all_grow = false;
    tail_sum += inc;
  }
  if (all_grow) {
    v.kind = Divergence::Diverges;
    v.detail = "partial integrals keep growing along the shrinking-eps schedule";
  } else if (tail_sum < policy.converge_increment_sum) {
    v.kind = Divergence::Converges;
    v.detail = "partial integrals settled along the shrinking-eps schedule";
  } else {
    v.kind = Divergence::Inconclusive;
    v.detail = "growth between the convergence and divergence thresholds";
  }
  return v;
}

}  // namespace

void BoundParams::validate() const {
  if (dim < 2) throw std::invalid_argument("BoundParams: dim must be >= 2");
  if (!(p > 0.0)) throw std::invalid_argument("BoundParams: p must be positive");
  if (!(chordal_gap > 0.0 && chordal_gap < 1.0)) {
    throw std::invalid_argument("BoundParams: the chordal gap must lie in (0, 1)");
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("BoundParams: mass bound must be positive and finite");
  }
  if (!(alpha_n > 0.0)) throw std::invalid_argument("BoundParams: alpha_n must be positive");
  if (!(working_radius > 0.0)) {
    throw std::invalid_argument("BoundParams: working radius must be positive");
  }
  if (!x0.is_infinity() && x0.dim() != dim) {
    throw std::invalid_argument("BoundParams: x0 dimension mismatch");
  }
}

double ring_modulus_integral(const MeanProfile& profile, double p, double eps, double rel_tol) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("ring_modulus_integral: need 0 < eps < 1");
  }
  if (!(p > 0.0)) throw std::invalid_argument("ring_modulus_integral: p must be positive");
  const double s_max = std::log(1.0 / eps);
  // a vanishing profile on part of the range makes the integral infinite
  for (int j = 0; j <= 64; ++j) {
    const double s = s_max * j / 64.0;
    if (profile.q(std::exp(-s)) <= 0.0) return kInf;
  }
  return integrate_1d(
      [&](double s) { return 1.0 / std::pow(profile.q(std::exp(-s)), 1.0 / p); }, 0.0, s_max,
      rel_tol);
}

double gauge_tail_integral(const Gauge& phi, double mean_value, double eps, double p, int dim,
                           double rel_tol) {
  if (!(mean_value > 0.0) || !std::isfinite(mean_value)) {
    throw std::invalid_argument("gauge_tail_integral: the ring mean must be positive and finite");
  }
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("gauge_tail_integral: need 0 < eps < 1");
  }
  const double lo_log = 1.0 + std::log(mean_value);                       // log(e M)
  const double hi_log = std::log(mean_value) + dim * std::log(1.0 / eps); // log(M / eps^n)
  if (lo_log >= hi_log) return 0.0;
  // zero generalized inverse on part of the range makes the integral infinite
  for (int j = 0; j <= 32; ++j) {
    const double u = lo_log + (hi_log - lo_log) * j / 32.0;
    if (phi.inverse_from_log(u) <= 0.0) return kInf;
  }
  const double val = integrate_1d(
      [&](double u) {
        const double inv = phi.inverse_from_log(u);
        return std::isinf(inv) ? 0.0 : 1.0 / std::pow(inv, 1.0 / p);
      },
      lo_log, hi_log, rel_tol);
  return val / dim;
}

BoundReport verify_mean_inequality(const Gauge& phi, const DistortionField& q, const Point& x0,
                                   double p, double eps, std::optional<double> lambda, double tol,
                                   double rel_tol) {
  if (!(phi.value_at_zero() > 0.0)) {
    throw std::invalid_argument(
        "verify_mean_inequality: the gauge must be positive (phi(0) > 0); lift it first");
  }
  if (lambda && !(*lambda > 0.0 && *lambda < 1.0)) {
    throw std::invalid_argument("verify_mean_inequality: lambda must lie in (0, 1)");
  }
  const int n = q.dim();
  const DistortionField q_eff = lambda ? truncate_unit_floor(q) : q;
  const double mean = ring_mean(apply_gauge(phi, q_eff), x0, eps, rel_tol);

  std::vector<double> grid;
  for (int j = 0; j <= 32; ++j) grid.push_back(eps * std::pow(1.0 / eps, j / 32.0));
  grid.back() = 1.0;
  MeanProfile profile = spherical_mean_profile(q_eff, x0, grid, rel_tol);
  profile.p_context = p;

  const double p_arg = lambda ? p / *lambda : p;
  const double lhs = ring_modulus_integral(profile, p_arg, eps, rel_tol);
  const double rhs = gauge_tail_integral(phi, mean, eps, p, n, rel_tol);

  BoundReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.lhs_divergent = std::isinf(lhs);
  rep.rhs_divergent = std::isinf(rhs);
  rep.tolerance = tol;
  rep.verdict = rep.lhs_divergent || (lhs >= rhs - tol);
  rep.inputs = {{"dim", static_cast<double>(n)},
                {"p", p},
                {"eps", eps},
                {"ring_mean", mean}};
  if (lambda) rep.inputs.emplace_back("lambda", *lambda);
  rep.note = lambda ? "unit-floor variant" : "";
  return rep;
}

DivergenceVerdict ray_divergence(const MeanProfile& profile, double a, double b,
                                 const DivergencePolicy& policy) {
  if (!(a >= 1.0)) throw std::invalid_argument("ray_divergence: need a >= 1");
  if (!(b > 0.0)) throw std::invalid_argument("ray_divergence: need b > 0");
  auto partial = [&](double eps) {
    const double s_max = std::log(1.0 / eps);
    for (int j = 0; j <= 64; ++j) {
      if (profile.q(std::exp(-s_max * j / 64.0)) <= 0.0) return kInf;
    }
    return integrate_1d(
        [&](double s) {
          return std::exp((a - 1.0) * s) / std::pow(profile.q(std::exp(-s)), b);
        },
        0.0, s_max, policy.quad_rel);
  };
  return schedule_verdict(partial, policy);
}

DivergenceVerdict profile_divergence(const Gauge& phi, const DistortionField& q, const Point& x0,
                                     double p, const DivergencePolicy& policy) {
  // finite gauge mass over the unit ball about x0 is a hypothesis, not a result
  double mass = 0.0;
  try {
    mass = class_membership_integral(phi, q, false, Domain::ball(x0, 1.0), policy.quad_rel);
  } catch (const NumericError& e) {
    throw NumericError(
        "profile_divergence: the gauge mass over the unit ball must be finite; got " +
            std::string(e.what()),
        e.partial());
  }

  const double delta0 = default_condition_delta(phi, p, ConditionId::InvRoot);
  const DivergenceVerdict cond = classify_condition(phi, p, ConditionId::InvRoot, delta0);

  MeanProfile profile = spherical_mean_profile(q, x0, {0.5, 1.0}, policy.quad_rel);
  profile.p_context = p;
  DivergenceVerdict numeric = ray_divergence(profile, 1.0, 1.0 / p, policy);
  numeric.detail += "; gauge mass " + std::to_string(mass);

  if (cond.kind == Divergence::Diverges) {
    numeric.kind = Divergence::Diverges;
    numeric.method = "closed-form + partial-integrals";
    numeric.detail += "; forced by the divergent inverse-gauge condition";
  }
  return numeric;
}

double lambda_constant(int dim) {
  return 2.0 * std::numbers::e / DimensionConstants::make(dim).ball_volume;
}

double beta_weight(const Point& x0, double rho, int dim) {
  if (x0.is_infinity()) throw std::invalid_argument("beta_weight: x0 must be finite");
  if (!(rho > 0.0)) throw std::invalid_argument("beta_weight: rho must be positive");
  const double s = rho + x0.norm();
  return std::pow(1.0 + s * s, dim) / std::pow(rho, dim);
}

double distortion_bound(const BoundParams& params, const MeanProfile& profile, const Point& x) {
  params.validate();
  if (params.x0.is_infinity()) {
    throw std::invalid_argument("distortion_bound: x0 must be finite (use at_infinity_bound)");
  }
  const double d = distance(x, params.x0);
  if (!(d < params.working_radius)) {
    throw std::domain_error("distortion_bound: x lies outside the working ball");
  }
  const double pexp = params.dim - 1.0;
  const double s_lo = std::log(1.0 / params.working_radius);
  auto integrand = [&](double s) {
    const double qv = profile.q(std::exp(-s));
    return qv <= 0.0 ? kInf : 1.0 / std::pow(qv, 1.0 / pexp);
  };

  double integral = 0.0;
  if (d > 0.0) {
    integral = integrate_1d(integrand, s_lo, std::log(1.0 / d), 1e-9);
  } else {
    // integrate over the stated range only; the upper limit is unbounded
    double acc = 0.0;
    double prev = s_lo;
    bool settled = false;
    for (int k = 0; k < 60; ++k) {
      const double next = prev + 4.0;
      acc += integrate_1d(integrand, prev, next, 1e-9);
      prev = next;
      if (acc > 745.0) return 0.0;  // exp(-acc) underflows: the bound is 0
      if (k > 2 && integrate_1d(integrand, next, next + 4.0, 1e-7) < 1e-12) {
        settled = true;
        break;
      }
    }
    if (!settled && acc <= 745.0) {
      throw NumericError("distortion_bound: profile integral at x0 did not settle", acc);
    }
    integral = acc;
  }
  return clamp01(params.alpha_n / params.chordal_gap * std::exp(-integral));
}

double equicontinuity_bound(const BoundParams& params, const Gauge& phi, const Point& x) {
  params.validate();
  if (params.x0.is_infinity()) {
    throw std::invalid_argument("equicontinuity_bound: x0 must be finite (use at_infinity_bound)");
  }
  const double tau0 = phi.value_at_zero();
  if (!(tau0 > 0.0)) {
    throw std::invalid_argument(
        "equicontinuity_bound: phi(0) must be positive; apply lift_gauge_for_bound first");
  }
  const int n = params.dim;
  const double rho = params.working_radius;
  const double d = distance(x, params.x0);
  if (!(d < rho / 2.0)) {
    throw std::domain_error("equicontinuity_bound: x must satisfy |x - x0| < rho/2");
  }

  const double lower = lambda_constant(n) * beta_weight(params.x0, rho, n) * params.mass;
  if (!(lower >= std::numbers::e * tau0 * (1.0 - 1e-12))) {
    throw std::invalid_argument(
        "equicontinuity_bound: mass bound is inconsistent with phi(0); "
        "no admissible field exists for these parameters");
  }
  const double prefactor = params.alpha_n / params.chordal_gap;
  const double pexp = n - 1.0;
  auto integrand = [&](double u) {
    const double inv = phi.inverse_from_log(u);
    if (inv <= 0.0) return kInf;
    return std::isinf(inv) ? 0.0 : 1.0 / std::pow(inv, 1.0 / pexp);
  };
  const double lo_log = std::log(lower);

  if (d == 0.0) {
    const DivergenceVerdict cond =
        classify_condition(phi, pexp, ConditionId::InvRoot,
                           std::max(lower, default_condition_delta(phi, pexp, ConditionId::InvRoot)));
    if (cond.kind == Divergence::Diverges) return 0.0;
    if (cond.kind == Divergence::Inconclusive) {
      throw NumericError("equicontinuity_bound: tail behaviour at x0 is inconclusive", 0.0);
    }
    double acc = 0.0;
    double prev = lo_log;
    for (int k = 0; k < 60; ++k) {
      const double next = prev + 8.0;
      const double inc = integrate_1d(integrand, prev, next, 1e-9);
      acc += inc;
      prev = next;
      if (acc > 745.0 * n) return 0.0;
      if (k > 1 && inc < 1e-12 * std::max(1.0, acc)) break;
    }
    return clamp01(prefactor * std::exp(-acc / n));
  }

  const double hi_log = std::log(tau0) + n * (std::log(rho) - std::log(d));
  if (lo_log >= hi_log) return clamp01(prefactor);
  const double integral = integrate_1d(integrand, lo_log, hi_log, 1e-9);
  return clamp01(prefactor * std::exp(-integral / n));
}

double at_infinity_bound(const BoundParams& params, const Gauge& phi, const Point& x) {
  if (!params.x0.is_infinity()) {
    throw std::invalid_argument("at_infinity_bound: params.x0 must be the point at infinity");
  }
  if (x.is_infinity()) {
    throw std::invalid_argument("at_infinity_bound: x must be finite");
  }
  BoundParams local = params;
  local.x0 = Point::origin(params.dim);
  return equicontinuity_bound(local, phi, invert(x));
}

GaugeLift lift_gauge_for_bound(const Gauge& phi, double delta0, double mass, const Domain& domain,
                               double rel_tol) {
  if (!(delta0 > 0.0)) throw std::invalid_argument("lift_gauge_for_bound: delta0 must be positive");
  const double wv = weighted_volume(domain, rel_tol);
  return GaugeLift{affine(phi, 1.0, delta0), mass + delta0 * wv, delta0, wv};
}

}  // namespace qcmean
