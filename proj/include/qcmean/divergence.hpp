#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qcmean {

enum class Divergence { Diverges, Converges, Inconclusive };

std::string to_string(Divergence d);

/// Outcome of an improper-integral classification together with the evidence
/// (partial integrals) that produced it. Closed-form verdicts may carry no
/// evidence; Inconclusive always does.
struct DivergenceVerdict {
  Divergence kind = Divergence::Inconclusive;
  std::vector<std::pair<double, double>> evidence;  // (upper limit, partial integral)
  std::string method;                               // "closed-form" | "partial-integrals"
  std::string detail;
};

/// Known tail behaviour of a non-negative integrand as the variable grows.
struct TailFamily {
  enum class Kind { Zero, ExpDecay, PowerLog, InfinitePlateau };
  Kind kind = Kind::PowerLog;
  double a = 0.0;  // integrand comparable to t^{-a} (log t)^{-b}
  double b = 0.0;

  static TailFamily zero() { return {Kind::Zero, 0.0, 0.0}; }
  static TailFamily exp_decay() { return {Kind::ExpDecay, 0.0, 0.0}; }
  static TailFamily power_log(double a, double b = 0.0) { return {Kind::PowerLog, a, b}; }
  static TailFamily infinite_plateau() { return {Kind::InfinitePlateau, 0.0, 0.0}; }
};

struct DivergencePolicy {
  double growth_per_decade = 0.5;       // Diverges: every trailing increment at least this
  double converge_increment_sum = 1e-6; // Converges: trailing increments sum below this
  int k_max = 12;                       // partial integrals up to 10^k_max
  int trailing_decades = 3;
  double quad_rel = 1e-9;
  bool force_numeric = false;           // ignore closed forms; gather evidence
};

struct IntegrandSpec {
  std::function<double(double)> f;  // non-negative on [lower, infinity)
  std::string label;
};

/// Decides whether the integral of `integrand` over [lower, infinity) diverges.
/// A closed-form tail classifies symbolically; otherwise partial integrals over
/// [lower, 10^k] are compared decade by decade against the policy thresholds.
DivergenceVerdict classify_divergence(const IntegrandSpec& integrand, double lower,
                                      std::optional<TailFamily> closed_form = {},
                                      const DivergencePolicy& policy = {});

}  // namespace qcmean
