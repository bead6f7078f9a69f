#include "qcmean/divergence.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qcmean/numerics.hpp"

namespace qcmean {

std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::Diverges: return "diverges";
    case Divergence::Converges: return "converges";
    case Divergence::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

DivergenceVerdict from_tail(const TailFamily& tail) {
  DivergenceVerdict v;
  v.method = "closed-form";
  switch (tail.kind) {
    case TailFamily::Kind::Zero:
      v.kind = Divergence::Converges;
      v.detail = "integrand vanishes on the tail";
      return v;
    case TailFamily::Kind::ExpDecay:
      v.kind = Divergence::Converges;
      v.detail = "exponentially decaying tail";
      return v;
    case TailFamily::Kind::InfinitePlateau:
      v.kind = Divergence::Diverges;
      v.detail = "integrand is infinite on a tail set";
      return v;
    case TailFamily::Kind::PowerLog:
      break;
  }
  if (tail.a > 1.0) {
    v.kind = Divergence::Converges;
  } else if (tail.a < 1.0) {
    v.kind = Divergence::Diverges;
  } else {
    v.kind = (tail.b <= 1.0) ? Divergence::Diverges : Divergence::Converges;
  }
  v.detail = "tail t^{-" + std::to_string(tail.a) + "} log^{-" + std::to_string(tail.b) + "} t";
  return v;
}

}  // namespace

DivergenceVerdict classify_divergence(const IntegrandSpec& integrand, double lower,
                                      std::optional<TailFamily> closed_form,
                                      const DivergencePolicy& policy) {
  if (!(lower > 0.0) || !std::isfinite(lower)) {
    throw std::invalid_argument("classify_divergence: lower limit must be positive and finite");
  }
  if (closed_form && !policy.force_numeric) {
    return from_tail(*closed_form);
  }
  if (!integrand.f) {
    throw std::invalid_argument("classify_divergence: no integrand and no closed form");
  }

  auto guarded = [&](double t) {
    const double v = integrand.f(t);
    if (v < 0.0) {
      throw std::invalid_argument("classify_divergence: integrand negative at t = " +
                                  std::to_string(t) + (integrand.label.empty()
                                                           ? std::string()
                                                           : " (" + integrand.label + ")"));
    }
    return v;
  };

  DivergenceVerdict v;
  v.method = "partial-integrals";

  int k0 = 1;
  while (std::pow(10.0, k0) <= lower * 10.0 && k0 < policy.k_max) ++k0;

  double partial = 0.0;
  double prev_limit = lower;
  std::vector<double> increments;
  for (int k = k0; k <= policy.k_max; ++k) {
    const double limit = std::pow(10.0, k);
    double inc = 0.0;
    try {
      inc = integrate_1d(guarded, prev_limit, limit, policy.quad_rel);
    } catch (const NumericError& e) {
      inc = e.partial();
      v.detail = "quadrature degraded on decade " + std::to_string(k);
    }
    partial += inc;
    increments.push_back(inc);
    v.evidence.emplace_back(limit, partial);
    prev_limit = limit;
  }

  const int trailing = policy.trailing_decades;
  if (static_cast<int>(increments.size()) < trailing) {
    v.kind = Divergence::Inconclusive;
    v.detail = "not enough decades sampled";
    return v;
  }

  bool all_grow = true;
  double tail_sum = 0.0;
  for (int i = 0; i < trailing; ++i) {
    const double inc = increments[increments.size() - 1 - static_cast<std::size_t>(i)];
    if (inc < policy.growth_per_decade) all_grow = false;
    tail_sum += inc;
  }
  if (all_grow) {
    v.kind = Divergence::Diverges;
    v.detail = "trailing decades grow by at least " + std::to_string(policy.growth_per_decade);
  } else if (tail_sum < policy.converge_increment_sum) {
    v.kind = Divergence::Converges;
    v.detail = "trailing decade increments sum below threshold";
  } else {
    v.kind = Divergence::Inconclusive;
    v.detail = "growth between the convergence and divergence thresholds";
  }
  return v;
}

}  // namespace qcmean
