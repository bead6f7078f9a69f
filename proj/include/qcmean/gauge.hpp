#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qcmean/divergence.hpp"

namespace qcmean {

/// Non-decreasing gauge on [0, infinity]. Values live in [0, infinity].
/// Immutable value type; copies share the underlying node tree.
class Gauge {
 public:
  enum class Family { Identity, Constant, Power, Exp, LogPower, Table, Affine };

  static Gauge identity();
  static Gauge constant(double c);
  static Gauge power(double c, double alpha);          // c * t^alpha
  static Gauge exp_power(double beta, double q);       // exp(beta * t^q)
  static Gauge log_power(double alpha, double beta);   // t^alpha * log(e + t)^beta
  static Gauge table(std::vector<std::pair<double, double>> points);
  static Gauge affine(double scale, double shift, Gauge inner);  // scale * inner + shift

  double eval(double t) const;
  double operator()(double t) const { return eval(t); }

  /// log(eval(t)); -infinity where the gauge vanishes. Computed in the log
  /// domain for the exponential family so large arguments do not overflow.
  double log_eval(double t) const;

  /// d/dt log(eval(t)) where it exists; 0 on plateaus of the gauge.
  double log_derivative(double t) const;

  /// Generalized inverse inf{t : eval(t) >= tau}; infinity on the empty set.
  double inverse(double tau) const;

  /// inverse(exp(log_tau)) evaluated stably for large log_tau.
  double inverse_from_log(double log_tau) const;

  double value_at_zero() const;        // tau_0
  double value_at_zero_plus() const;   // right limit at 0
  double zero_plateau_end() const;     // t_0 = sup{t : eval(t) = 0}; 0 if eval(0) > 0
  double initial_plateau_end() const;  // t_* = sup{t : eval(t) = eval(0)}
  double sup_value() const;           // value at +infinity (may be infinite)
  bool bounded() const;

  Family family() const;
  std::string describe() const;
  std::vector<double> jump_points() const;  // discontinuities (table gauges)

  /// Asymptotic growth used for closed-form condition classification.
  struct GrowthClass {
    enum class Kind { Bounded, LogOnly, PolyLog, ExpPower };
    Kind kind = Kind::Bounded;
    double exponent = 0.0;  // PolyLog: power of t; ExpPower: q in log(phi) ~ t^q
  };
  GrowthClass growth_class() const;

 private:
  struct Node;
  explicit Gauge(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> node_;
};

/// Free-function form of the affine transform scale * g + shift.
Gauge affine(const Gauge& g, double scale, double shift);

/// The powered gauge t -> phi(t^p) with its log transform H_p = log phi_p.
class PoweredGauge {
 public:
  PoweredGauge(Gauge base, double p);

  double eval(double t) const;
  double log_eval(double t) const;       // H_p(t); -infinity on the zero plateau
  double h_derivative(double t) const;   // H_p'(t), completed by 0 on the plateau
  double inverse(double tau) const;      // = base.inverse(tau)^{1/p}
  double h_inverse(double eta) const;    // inf{t : H_p(t) >= eta}
  double value_at_zero() const;
  double value_at_zero_plus() const;
  double zero_plateau_end() const;
  Gauge::GrowthClass growth_class() const;

  const Gauge& base() const { return base_; }
  double p() const { return p_; }

 private:
  Gauge base_;
  double p_;
};

/// The equivalent divergence conditions on a gauge.
enum class ConditionId {
  DerivLog,        // integral of H_p'(t) dt / t
  StieltjesLog,    // integral of dH_p(t) / t
  LogOverT2,       // integral of H_p(t) dt / t^2
  LogRecip,        // integral of H_p(1/t) dt over (0, delta)
  InvH,            // integral of d eta / H_p^{-1}(eta)
  InvPhi,          // integral of d tau / (tau * phi_p^{-1}(tau))
  InvRoot,         // integral of d tau / (tau * [phi^{-1}(tau)]^{1/p})
  LogGaugeNPrime,  // integral of log phi(t) dt / t^{n'}, n' = (p+1)/p
};

std::string to_string(ConditionId c);
std::vector<ConditionId> all_conditions();

/// Classifies the selected divergence condition for phi_p built from g and p.
/// `delta` is the lower limit (for LogRecip the upper limit); it must clear the
/// degeneracy thresholds of the condition or an error names the threshold.
DivergenceVerdict classify_condition(const Gauge& g, double p, ConditionId cond, double delta,
                                     const DivergencePolicy& policy = {});

/// A lower limit that clears the degeneracy thresholds for the condition.
double default_condition_delta(const Gauge& g, double p, ConditionId cond);

/// Verdicts for the same condition at two exponents p1 < p2. Conditions only
/// get weaker as p grows, so p1 diverging rules out p2 converging.
std::pair<DivergenceVerdict, DivergenceVerdict> weakest_p_note(
    const Gauge& g, double p1, double p2, ConditionId cond,
    std::optional<double> delta = {});

struct InverseEvalBound {
  double lhs;  // phi^{-1}(phi(t))
  double rhs;  // t
  bool ok;     // lhs <= rhs (within 1e-12 slack)
};
InverseEvalBound inverse_of_eval_bound(const Gauge& g, double t);

/// Certifies strict increase at t by a forward difference probe.
bool strictly_increasing_at(const Gauge& g, double t);

/// Convexity certificate: the slopes (phi(t) - phi(0)) / t are non-decreasing
/// along the given strictly increasing positive sample.
bool slope_is_nondecreasing(const Gauge& g, const std::vector<double>& sample);

}  // namespace qcmean
