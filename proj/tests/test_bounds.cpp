#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcmean/bounds.hpp"
#include "qcmean/numerics.hpp"
#include "support/oracles.hpp"

using namespace qcmean;

namespace {

MeanProfile constant_profile(double c) {
  MeanProfile p;
  p.center = Point::origin(2);
  p.radii = {1e-14, 1.0};
  p.values = {c, c};
  p.evaluator = [c](double) { return c; };
  return p;
}

MeanProfile profile_of(std::function<double(double)> q) {
  MeanProfile p;
  p.center = Point::origin(2);
  p.radii = {1e-14, 1.0};
  p.values = {q(1e-14), q(1.0)};
  p.evaluator = std::move(q);
  return p;
}

DistortionField const_field(double c, int dim) { return DistortionField::constant(c, dim); }

}  // namespace

TEST_CASE("ring modulus integral closed forms") {
  CHECK(ring_modulus_integral(constant_profile(1.0), 1.0, 0.1) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-9));
  CHECK(ring_modulus_integral(profile_of([](double r) { return 1.0 / r; }), 1.0, 0.1) ==
        doctest::Approx(0.9).epsilon(1e-9));
  CHECK(ring_modulus_integral(constant_profile(16.0), 4.0, std::exp(-1.0)) ==
        doctest::Approx(0.5).epsilon(1e-9));
  // vanishing profile: divergent tag
  CHECK(std::isinf(ring_modulus_integral(constant_profile(0.0), 1.0, 0.5)));
}

TEST_CASE("gauge tail integral closed forms") {
  // degenerate range
  CHECK(gauge_tail_integral(Gauge::exp_power(1.0, 1.0), 1.0, 0.8, 1.0, 2) == 0.0);
  CHECK(gauge_tail_integral(Gauge::exp_power(1.0, 1.0), 1.0, std::exp(-0.5), 1.0, 2) == 0.0);

  // (1/2) integral over (e, 100) of d tau / (tau log tau) = (1/2) log log 100
  CHECK(gauge_tail_integral(Gauge::exp_power(1.0, 1.0), 1.0, 0.1, 1.0, 2) ==
        doctest::Approx(0.5 * std::log(std::log(100.0))).epsilon(1e-9));
  CHECK(gauge_tail_integral(Gauge::exp_power(1.0, 1.0), 1.0, 0.1, 1.0, 2) ==
        doctest::Approx(0.763590).epsilon(2e-6));

  // (1/2) integral over (e, 100) of d tau / tau^2 = (1/2)(1/e - 1/100)
  CHECK(gauge_tail_integral(Gauge::identity(), 1.0, 0.1, 1.0, 2) ==
        doctest::Approx(0.5 * (std::exp(-1.0) - 0.01)).epsilon(1e-9));
  CHECK(gauge_tail_integral(Gauge::identity(), 1.0, 0.1, 1.0, 2) ==
        doctest::Approx(0.178940).epsilon(2e-6));

  CHECK_THROWS_AS(gauge_tail_integral(Gauge::identity(), 0.0, 0.1, 1.0, 2),
                  std::invalid_argument);
}

TEST_CASE("gauge tail integral against a brute-force oracle on a table gauge") {
  const Gauge table = Gauge::table({{0.0, 1.0}, {2.0, 1.0}, {2.0, 5.0}});
  const double mean = 1.2, eps = 0.2, p = 1.5;
  const int n = 2;
  const double lo = std::numbers::e * mean;
  const double hi = mean / (eps * eps);
  // the integrand drops to zero above the table's top value; split there so
  // the midpoint oracle is not polluted by the jump
  auto integrand = [&](double tau) {
    const double inv = table.inverse(tau);
    return std::isinf(inv) ? 0.0 : 1.0 / (tau * std::pow(inv, 1.0 / p));
  };
  const double top = table.sup_value();
  const double brute = (testing::brute_integral(integrand, lo, top, 200000) +
                        testing::brute_integral(integrand, top, hi, 200000)) /
                       n;
  CHECK(gauge_tail_integral(table, mean, eps, p, n) == doctest::Approx(brute).epsilon(1e-6));
}

TEST_CASE("mean inequality: exponential gauge over the constant field") {
  const BoundReport rep =
      verify_mean_inequality(Gauge::exp_power(1.0, 1.0), const_field(1.0, 2), Point::origin(2),
                             1.0, 0.1);
  CHECK(rep.lhs == doctest::Approx(std::log(10.0)).epsilon(1e-6));
  // ring mean of phi(Q) = e, so the tail runs from e*e to 100 e
  const double expected_rhs =
      0.5 * (std::log(std::log(100.0 * std::numbers::e)) - std::log(std::log(std::numbers::e *
                                                                             std::numbers::e)));
  CHECK(rep.rhs == doctest::Approx(expected_rhs).epsilon(1e-6));
  CHECK(rep.verdict);
}

TEST_CASE("mean inequality: shifted identity gauge stays positive and true") {
  const Gauge phi = Gauge::affine(1.0, 1.0, Gauge::identity());
  for (double eps : {0.5, 0.25, 0.1, 0.05}) {
    const BoundReport rep =
        verify_mean_inequality(phi, const_field(1.0, 2), Point::origin(2), 1.0, eps);
    CHECK(rep.verdict);
    CHECK(rep.lhs >= rep.rhs - 1e-7);
  }
  // gauges vanishing at zero are rejected
  CHECK_THROWS_AS(verify_mean_inequality(Gauge::identity(), const_field(1.0, 2),
                                         Point::origin(2), 1.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("mean inequality with the unit-floor variant") {
  const Gauge phi = Gauge::affine(1.0, 1.0, Gauge::identity());
  const BoundReport rep = verify_mean_inequality(phi, const_field(0.25, 2), Point::origin(2),
                                                 1.0, 0.1, 0.5);
  // the floored mean profile is identically 1
  CHECK(rep.lhs == doctest::Approx(std::log(10.0)).epsilon(1e-9));
  CHECK(rep.verdict);
}

TEST_CASE("ring modulus integral against a brute-force oracle") {
  const MeanProfile wiggly = profile_of([](double r) { return 2.0 + std::sin(3.0 * r); });
  for (double p : {0.5, 1.0, 2.0}) {
    for (double eps : {0.3, 0.1}) {
      const double brute = testing::brute_integral(
          [&](double r) { return 1.0 / (r * std::pow(2.0 + std::sin(3.0 * r), 1.0 / p)); }, eps,
          1.0, 200000);
      CHECK(ring_modulus_integral(wiggly, p, eps) == doctest::Approx(brute).epsilon(1e-7));
    }
  }
}

TEST_CASE("mean inequality on a non-radial analytic field") {
  const auto field = DistortionField::analytic(
      [](const Point& x) { return 1.0 + x[0] * x[0] + 0.5 * x[1]; }, 2,
      Domain::ball(Point::origin(2), 1.0), "1+x1^2+x2/2");
  const Gauge phi = Gauge::exp_power(0.5, 1.0);
  for (double eps : {0.5, 0.2}) {
    const BoundReport rep =
        verify_mean_inequality(phi, field, Point::origin(2), 1.0, eps, {}, 1e-7, 1e-8);
    CHECK(rep.verdict);
    CHECK(rep.lhs >= rep.rhs - 1e-7);
  }
}

TEST_CASE("mean inequality on a gridded field") {
  GridData data;
  data.dim = 2;
  const int side = 23;
  for (int k = 0; k < 2; ++k) {
    std::vector<double> ax;
    for (int i = 0; i < side; ++i) ax.push_back(-1.1 + 2.2 * i / (side - 1));
    data.axes.push_back(ax);
  }
  for (double x : data.axes[0]) {
    for (double y : data.axes[1]) data.values.push_back(1.0 + x * x + y * y);
  }
  const auto field = DistortionField::grid(data);
  const Gauge phi = Gauge::affine(1.0, 1.0, Gauge::identity());
  const BoundReport rep =
      verify_mean_inequality(phi, field, Point::origin(2), 1.0, 0.25, {}, 1e-7, 1e-6);
  CHECK(rep.verdict);
}

TEST_CASE("profile divergence schedule") {
  const auto diverges = profile_divergence(Gauge::exp_power(1.0, 1.0), const_field(1.0, 2),
                                           Point::origin(2), 1.0);
  CHECK(diverges.kind == Divergence::Diverges);
  CHECK(!diverges.evidence.empty());

  // bounded partial integrals: 1 - eps stays below 1
  const auto q = DistortionField::radial([](double r) { return 1.0 / r; }, Point::origin(2), {},
                                         "1/r");
  const auto converges = profile_divergence(Gauge::affine(1.0, 1.0, Gauge::identity()), q,
                                            Point::origin(2), 1.0);
  CHECK(converges.kind == Divergence::Converges);

  // infinite gauge mass violates the hypothesis
  const auto steep = DistortionField::radial([](double r) { return std::pow(r, -3.0); },
                                             Point::origin(2), {}, "r^-3");
  CHECK_THROWS_AS(profile_divergence(Gauge::power(1.0, 2.0), steep, Point::origin(2), 1.0),
                  NumericError);
}

TEST_CASE("generalized ray integrals diverge for admissible exponents") {
  const MeanProfile one = constant_profile(1.0);
  for (double a : {1.0, 1.5, 2.0}) {
    for (double b : {0.25, 0.5, 1.0}) {
      if (b > a) continue;
      const auto v = ray_divergence(one, a, b);
      CHECK(v.kind == Divergence::Diverges);
    }
  }
}

TEST_CASE("distortion bound closed form and limits") {
  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.5;
  params.alpha_n = 0.1;
  params.working_radius = 0.5;
  params.x0 = Point::origin(2);

  const MeanProfile one = constant_profile(1.0);
  for (double d : {0.05, 0.1, 0.2}) {
    const Point x(std::vector<double>{d, 0.0});
    // exp(-log(radius/d)) = d / radius
    CHECK(distortion_bound(params, one, x) ==
          doctest::Approx(params.alpha_n / params.chordal_gap * d / params.working_radius)
              .epsilon(1e-9));
  }

  // bound approaches 0 when the profile integral blows up towards x0
  const MeanProfile shrinking = profile_of([](double r) { return r; });
  double prev = 1.0;
  for (double d : {0.1, 0.01, 0.001}) {
    const double b = distortion_bound(params, shrinking, Point(std::vector<double>{d, 0.0}));
    CHECK(b <= prev + 1e-15);
    prev = b;
  }
  CHECK(prev <= 1e-10);

  // infinite profile: zero integrand, bound clamps to alpha/gap
  const MeanProfile infinite = profile_of([](double r) {
    (void)r;
    return std::numeric_limits<double>::infinity();
  });
  CHECK(distortion_bound(params, infinite, Point(std::vector<double>{0.1, 0.0})) ==
        doctest::Approx(params.alpha_n / params.chordal_gap));

  CHECK_THROWS_AS(distortion_bound(params, one, Point(std::vector<double>{0.7, 0.0})),
                  std::domain_error);
}

TEST_CASE("distortion bound about an off-centre point with a cubature profile") {
  const Point x0(std::vector<double>{0.2, 0.0});
  const auto field = DistortionField::analytic(
      [&](const Point& x) {
        const Point d = x - x0;
        return 1.0 + d.norm_sq();
      },
      2, Domain::ball(Point::origin(2), 2.0), "1+|x-x0|^2");
  std::vector<double> radii;
  for (int j = 1; j <= 24; ++j) radii.push_back(0.4 * j / 24.0);
  const MeanProfile prof = spherical_mean_profile(field, x0, radii);

  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.5;
  params.alpha_n = 0.2;
  params.working_radius = 0.4;
  params.x0 = x0;

  double prev = 0.0;
  for (double d : {0.02, 0.05, 0.1, 0.3}) {
    const double b = distortion_bound(params, prof, x0 + Point(std::vector<double>{d, 0.0}));
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(b >= prev - 1e-13);
    prev = b;
  }
}

TEST_CASE("equicontinuity bound constants") {
  CHECK(lambda_constant(2) == doctest::Approx(2.0 * std::numbers::e / std::numbers::pi)
                                  .epsilon(1e-12));
  CHECK(lambda_constant(2) == doctest::Approx(1.7305122).epsilon(1e-6));
  CHECK(beta_weight(Point::origin(2), 1.0, 2) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(beta_weight(Point(std::vector<double>{1.0, 0.0}), 0.5, 2) ==
        doctest::Approx(std::pow(1.0 + 2.25, 2) / 0.25).epsilon(1e-12));
}

TEST_CASE("equicontinuity bound: monotone, clamped, linear in alpha_n") {
  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.9;
  params.mass = 1.0;
  params.alpha_n = 0.25;
  params.working_radius = 0.5;
  params.x0 = Point::origin(2);
  const Gauge phi = Gauge::exp_power(1.0, 1.0);

  double prev = 0.0;
  for (int k = 20; k >= 3; --k) {
    const double d = params.working_radius * std::pow(2.0, -k);
    const double b = equicontinuity_bound(params, phi, Point(std::vector<double>{d, 0.0}));
    CHECK(b >= 0.0);
    CHECK(b <= 1.0);
    CHECK(b >= prev - 1e-13);  // non-decreasing in |x - x0|
    prev = b;
  }

  const Point probe(std::vector<double>{0.01, 0.0});
  const double b1 = equicontinuity_bound(params, phi, probe);
  BoundParams doubled = params;
  doubled.alpha_n = 0.5;
  CHECK(equicontinuity_bound(doubled, phi, probe) == doctest::Approx(2.0 * b1).epsilon(1e-12));

  // non-increasing in the mass bound
  BoundParams heavier = params;
  heavier.mass = 2.0;
  CHECK(equicontinuity_bound(heavier, phi, probe) >= b1 - 1e-13);

  // outside the half-radius ball
  CHECK_THROWS_AS(equicontinuity_bound(params, phi, Point(std::vector<double>{0.3, 0.0})),
                  std::domain_error);
  // vanishing gauge value at zero directs to the lift
  CHECK_THROWS_AS(equicontinuity_bound(params, Gauge::identity(), probe),
                  std::invalid_argument);
}

TEST_CASE("equicontinuity bound matches its closed form for the exponential gauge") {
  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.8;
  params.mass = 1.5;
  params.alpha_n = 0.3;
  params.working_radius = 0.4;
  params.x0 = Point::origin(2);
  const Gauge phi = Gauge::exp_power(1.0, 1.0);
  // inverse of e^t is log(tau): the tail integrates to log log, so the bound
  // collapses to (alpha/gap) * sqrt(log L / log U)
  const double lower = lambda_constant(2) * beta_weight(params.x0, 0.4, 2) * params.mass;
  for (double d : {0.01, 0.001}) {
    const double upper = std::pow(0.4 / d, 2);  // phi(0) = 1
    const double expected =
        params.alpha_n / params.chordal_gap * std::sqrt(std::log(lower) / std::log(upper));
    CHECK(equicontinuity_bound(params, phi, Point(std::vector<double>{d, 0.0})) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("equicontinuity bound vanishes at the centre for a divergent gauge condition") {
  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.9;
  params.mass = 1.0;
  params.alpha_n = 1.0;
  params.working_radius = 0.5;
  params.x0 = Point::origin(2);
  CHECK(equicontinuity_bound(params, Gauge::exp_power(1.0, 1.0), Point::origin(2)) == 0.0);
}

TEST_CASE("gauge lift for bounds") {
  const auto lift = lift_gauge_for_bound(Gauge::identity(), 1.0, 2.0,
                                         Domain::ball(Point::origin(2), 1.0));
  CHECK(lift.lifted.eval(0.0) == doctest::Approx(1.0));
  CHECK(lift.weighted_volume == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-8));
  CHECK(lift.adjusted_mass == doctest::Approx(2.0 + std::numbers::pi / 2.0).epsilon(1e-8));
}

TEST_CASE("bound about the point at infinity via inversion") {
  BoundParams params;
  params.dim = 2;
  params.chordal_gap = 0.9;
  params.mass = 1.0;
  params.alpha_n = 0.25;
  params.working_radius = 0.5;
  params.x0 = Point::infinity(2);
  const Gauge phi = Gauge::exp_power(1.0, 1.0);

  const Point far(std::vector<double>{40.0, 30.0});  // |x| = 50, inverts to |y| = 0.02
  const double via_infinity = at_infinity_bound(params, phi, far);

  BoundParams centred = params;
  centred.x0 = Point::origin(2);
  CHECK(via_infinity == doctest::Approx(equicontinuity_bound(centred, phi, invert(far))));

  CHECK_THROWS_AS(at_infinity_bound(centred, phi, far), std::invalid_argument);
  CHECK_THROWS_AS(equicontinuity_bound(params, phi, far), std::invalid_argument);
}

TEST_CASE("bound params validation") {
  BoundParams params;
  params.chordal_gap = 1.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
  params.chordal_gap = 0.5;
  CHECK_NOTHROW(params.validate());
  params.mass = 0.0;
  CHECK_THROWS_AS(params.validate(), std::invalid_argument);
}
