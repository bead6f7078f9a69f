#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "qcmean/bounds.hpp"
#include "qcmean/field.hpp"
#include "qcmean/gauge.hpp"
#include "qcmean/geometry.hpp"

namespace qcmean {

/// A gauge prepared for the radial construction: equal to t on [0, 1), an
/// affine-rescaled copy of the raw gauge above, and satisfying the powered
/// lower bound phi_{n-1}(t) >= t on the working range.
class ExtremalSetup {
 public:
  int dim() const { return dim_; }
  double gamma() const { return gamma_; }                 // sqrt(phi(1))
  double scale_used() const { return scale_; }
  double shift_used() const { return shift_; }
  double growth_c() const { return growth_c_; }
  double growth_t() const { return growth_t_; }
  const Gauge& raw() const { return raw_; }

  double phi(double t) const;             // the normalized gauge
  double phi_nm1(double t) const;         // phi(t^{n-1})
  double phi_nm1_inverse(double tau) const;
  double phi_nm1_inverse_from_log(double log_tau) const;
  double psi(double t) const;             // t * phi_nm1(t), strictly increasing

 private:
  friend ExtremalSetup normalize_gauge(const Gauge&, int,
                                       std::optional<std::pair<double, double>>);
  Gauge raw_ = Gauge::identity();
  Gauge transformed_ = Gauge::identity();  // scale * raw + shift, used for t >= 1
  int dim_ = 2;
  double gamma_ = 1.0;
  double scale_ = 1.0;
  double shift_ = 0.0;
  double growth_c_ = 1.0;
  double growth_t_ = 1.0;
};

/// Builds an ExtremalSetup after checking the growth certificate
/// phi(t) >= C t^{1/(n-1)} on a geometric sample grid. When (C, T) are not
/// supplied, C is fitted as the sampled minimum of phi(t)/t^{1/(n-1)} over
/// t >= 1 and T = 1. Bounded gauges are rejected.
ExtremalSetup normalize_gauge(const Gauge& raw, int dim,
                              std::optional<std::pair<double, double>> growth_ct = {});

/// Solved decay profile K with K(1) = 1 and psi(K(r)) = (gamma/r)^2, together
/// with its truncations, integrals and radius map. Immutable and shareable.
class RadialProfile {
 public:
  const ExtremalSetup& setup() const;
  std::optional<int> truncation() const { return m_; }

  double K(double r) const;              // truncation-aware profile value
  double K_untruncated(double r) const;
  double I(double t) const;              // integral of dr/(r K(r)) over (t, 1)
  double I0() const;                     // I(0) of the untruncated profile
  double R(double t) const;              // radius map exp{I0 - I(t)}; 0 at 0 when truncated
  const std::vector<std::pair<double, double>>& samples() const;  // (r, K(r)) grid

 private:
  friend RadialProfile solve_profile(const ExtremalSetup&, const std::vector<double>&, double);
  friend RadialProfile truncate_profile(const RadialProfile&, int);
  struct Core;
  std::shared_ptr<const Core> core_;
  std::optional<int> m_;
};

RadialProfile solve_profile(const ExtremalSetup& setup, const std::vector<double>& radii,
                            double root_tol = 1e-12);

/// K_m(r) = K(r) for r >= 1/m and K(1/m) below; the map stays continuous and
/// becomes quasiconformal with coefficient K(1/m)^{n-1}.
RadialProfile truncate_profile(const RadialProfile& profile, int m);

/// I(t), respecting the truncation; +infinity at t = 0 for truncated profiles
/// (which is what sends the truncated map through the origin).
double profile_integral(const RadialProfile& profile, double t);

struct RadialMapSample {
  Point x = Point::origin(2);
  Point image = Point::origin(2);
  double tangent_distortion = 0.0;  // |f(x)| / |x|
  double radial_distortion = 0.0;   // d|f(x)| / d|x|
  double inner_dilatation = 0.0;    // (tangent/radial)^{n-1} = K(|x|)^{n-1}
};

/// Evaluates the radial map x -> (x/|x|) R(|x|) with its distortions.
/// Untruncated profiles are defined on the punctured ball; truncated ones map
/// the origin to the origin.
RadialMapSample eval_map(const RadialProfile& profile, const Point& x);

struct GaugeMass {
  double mass;   // integral of phi(K_I(x, f_m)) over the unit ball
  double bound;  // gamma^2 * omega_{n-1} * I(0)
};
GaugeMass gauge_mass(const RadialProfile& profile, double rel_tol = 1e-10);

struct WitnessRow {
  double delta;
  int m;
  double min_abs_f;     // min over |x| = delta of |f_m(x)|
  double chordal_osc;   // chordal distance between f_m at that x and f_m(0)
  bool separated;       // min_abs_f >= 1
};

/// Non-equicontinuity witness at the origin: every m >= 1/delta keeps
/// |f_m| >= 1 on the sphere |x| = delta while f_m(0) = 0.
std::vector<WitnessRow> nonequicontinuity_witness(const RadialProfile& profile, double delta,
                                                  const std::vector<int>& m_list);

/// Image/mass membership summary for the truncated map: image ball radius
/// e^{I0}, realized chordal gap of the omitted set, and the mass bound.
BoundReport membership_check(const RadialProfile& profile, int m, double delta_report);

}  // namespace qcmean
