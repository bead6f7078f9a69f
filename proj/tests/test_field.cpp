#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qcmean/field.hpp"
#include "qcmean/numerics.hpp"
#include "support/oracles.hpp"

using namespace qcmean;

namespace {

DistortionField one_over_r(int dim) {
  return DistortionField::radial([](double r) { return 1.0 / r; }, Point::origin(dim),
                                 Domain::ball(Point::origin(dim), 1.0), "1/r");
}

}  // namespace

TEST_CASE("spherical mean profiles: constants, radial and symmetric fields") {
  const auto c = DistortionField::constant(2.5, 2);
  const MeanProfile pc = spherical_mean_profile(c, Point::origin(2), {0.1, 0.5, 0.9});
  for (double v : pc.values) CHECK(v == doctest::Approx(2.5));

  const auto rad = DistortionField::radial([](double r) { return r; }, Point::origin(2), {},
                                           "r");
  const MeanProfile pr = spherical_mean_profile(rad, Point::origin(2), {0.25, 0.5, 0.75});
  CHECK(pr.values[0] == doctest::Approx(0.25));
  CHECK(pr.q(0.6) == doctest::Approx(0.6));

  const auto aff = DistortionField::analytic([](const Point& x) { return 1.0 + x[0]; }, 2, {},
                                             "1+x1");
  const MeanProfile pa = spherical_mean_profile(aff, Point::origin(2), {0.3, 0.8});
  CHECK(pa.values[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(pa.values[1] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("spherical mean profile rejects spheres leaving the domain") {
  const auto rad = one_over_r(2);
  CHECK_THROWS_AS(spherical_mean_profile(rad, Point::origin(2), {0.5, 1.5}), std::domain_error);
  CHECK_THROWS_AS(spherical_mean_profile(rad, Point::unit(2, 0), {0.5}), std::domain_error);
  // dim >= 4 only through the radial fast path
  const auto c6 = DistortionField::constant(1.0, 6);
  CHECK_NOTHROW(spherical_mean_profile(c6, Point::origin(6), {0.5}));
  const auto a6 = DistortionField::analytic([](const Point& x) { return 1.0 + x[0] * x[0]; }, 6,
                                            {}, "");
  CHECK_THROWS_AS(spherical_mean_profile(a6, Point::origin(6), {0.5}), std::domain_error);
}

TEST_CASE("unit floor truncation") {
  CHECK(truncate_unit_floor(DistortionField::constant(0.5, 2)).radial_value(0.3) ==
        doctest::Approx(1.0));
  CHECK(truncate_unit_floor(DistortionField::constant(3.0, 2)).radial_value(0.3) ==
        doctest::Approx(3.0));

  const auto rad = DistortionField::radial([](double r) { return r; }, Point::origin(2), {},
                                           "r");
  const auto floored = truncate_unit_floor(rad);
  for (double r : {0.1, 0.5, 0.99}) CHECK(floored.radial_value(r) == doctest::Approx(1.0));
  // idempotent
  const auto twice = truncate_unit_floor(floored);
  CHECK(twice.radial_value(0.4) == doctest::Approx(1.0));

  // floored sphere means dominate both the original means and 1
  const MeanProfile q = spherical_mean_profile(rad, Point::origin(2), {0.2, 0.6});
  const MeanProfile qs = spherical_mean_profile(floored, Point::origin(2), {0.2, 0.6});
  for (std::size_t i = 0; i < q.values.size(); ++i) {
    CHECK(qs.values[i] >= std::max(q.values[i], 1.0) - 1e-12);
  }
}

TEST_CASE("ring means") {
  const auto c = DistortionField::constant(4.0, 2);
  CHECK(ring_mean(c, Point::origin(2), 0.3) == doctest::Approx(4.0).epsilon(1e-10));

  CHECK(ring_mean(one_over_r(2), Point::origin(2), 0.5) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(ring_mean(one_over_r(2), Point::origin(2), 1e-6) == doctest::Approx(2.0).epsilon(1e-5));

  // general cubature path matches the radial closed form
  const auto as_analytic = DistortionField::analytic(
      [](const Point& x) { return 1.0 / x.norm(); }, 2, {}, "1/|x|");
  CHECK(ring_mean(as_analytic, Point::origin(2), 0.5) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-8));

  CHECK_THROWS_AS(ring_mean(c, Point::origin(2), 1.5), std::invalid_argument);
}

TEST_CASE("ring mean is monotone under gauge domination") {
  const auto q = one_over_r(2);
  const Gauge lo = Gauge::identity();
  const Gauge hi = Gauge::affine(1.0, 1.0, Gauge::identity());  // t + 1 >= t
  for (double eps : {0.5, 0.25, 0.1}) {
    const double m_lo = ring_mean(apply_gauge(lo, q), Point::origin(2), eps);
    const double m_hi = ring_mean(apply_gauge(hi, q), Point::origin(2), eps);
    CHECK(m_lo <= m_hi + 1e-12);
  }
}

TEST_CASE("class membership integrals") {
  const auto q1 = DistortionField::constant(1.0, 2);
  CHECK(class_membership_integral(Gauge::identity(), q1, false) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-9));

  const double unweighted = class_membership_integral(Gauge::identity(), one_over_r(2), false);
  const double weighted = class_membership_integral(Gauge::identity(), one_over_r(2), true);
  CHECK(weighted <= unweighted + 1e-12);
  // bounded-domain conversion: weight >= (1 + sup|x|^2)^{-n} on the unit disc
  CHECK(unweighted <= std::pow(1.0 + 1.0, 2) * weighted + 1e-9);

  // a genuinely divergent mass errors with a partial value
  const auto steep = DistortionField::radial([](double r) { return std::pow(r, -4.0); },
                                             Point::origin(2), {}, "r^-4");
  CHECK_THROWS_AS(class_membership_integral(Gauge::identity(), steep, false), NumericError);

  // weighted integral over the whole space for a constant field
  const auto cs = DistortionField::constant(1.0, 2, Domain::space(2));
  const double space_val = class_membership_integral(Gauge::identity(), cs, true);
  // closed form: 2 pi * integral r dr / (1+r^2)^2 = pi
  CHECK(space_val == doctest::Approx(std::numbers::pi).epsilon(1e-8));
  CHECK_THROWS_AS(class_membership_integral(Gauge::identity(), cs, false),
                  std::invalid_argument);
}

TEST_CASE("weighted volume closed form on the plane") {
  // whole plane: pi; unit disc: pi * (1 - 1/2) = pi/2
  CHECK(weighted_volume(Domain::space(2)) == doctest::Approx(std::numbers::pi).epsilon(1e-8));
  CHECK(weighted_volume(Domain::ball(Point::origin(2), 1.0)) ==
        doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-9));
}

TEST_CASE("sphere-mean convexity inequality on random analytic fields") {
  auto rng = testing::seeded_rng(55);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int dim : {2, 3}) {
    for (int i = 0; i < 25; ++i) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const auto field = DistortionField::analytic(
          [a, b, c, dim](const Point& x) {
            const double s = std::sin(x[0] + x[1]);
            double v = 1.0 + a * x[0] * x[0] + b * s * s;
            if (dim >= 3) v += c * x[2] * x[2];
            return v;
          },
          dim, Domain::ball(Point::origin(dim), 2.0), "random");
      const Gauge phi = (i % 2 == 0) ? Gauge::power(1.0, 2.0) : Gauge::exp_power(0.7, 1.0);
      const double r = 0.2 + 0.7 * u(rng) / 1.5;
      const MeanProfile prof = spherical_mean_profile(field, Point::origin(dim), {r});
      const double lhs = phi.eval(prof.values[0]);
      const double rhs = sphere_mean(
          [&](const Point& x) { return phi.eval(field.eval(x)); }, Point::origin(dim), r, dim);
      CHECK(lhs <= rhs + 1e-8);
    }
  }
}

TEST_CASE("radial fast path agrees with cubature") {
  for (int dim : {2, 3}) {
    const auto rad = DistortionField::radial([](double r) { return 1.0 + r * r; },
                                             Point::origin(dim), {}, "1+r^2");
    const auto gen = DistortionField::analytic(
        [](const Point& x) { return 1.0 + x.norm_sq(); }, dim, {}, "1+|x|^2");
    for (double r : {0.3, 0.7}) {
      const MeanProfile a = spherical_mean_profile(rad, Point::origin(dim), {r});
      const MeanProfile b = spherical_mean_profile(gen, Point::origin(dim), {r});
      CHECK(a.values[0] == doctest::Approx(b.values[0]).epsilon(1e-8));
    }
  }
}

TEST_CASE("grid fields interpolate and refuse extrapolation") {
  GridData data;
  data.dim = 2;
  data.axes = {{-1.0, 0.0, 1.0}, {-1.0, 0.0, 1.0}};
  // values of 2 + x1 on the 3x3 lattice, row-major over (x1, x2)
  data.values = {1, 1, 1, 2, 2, 2, 3, 3, 3};
  const auto g = DistortionField::grid(data);
  CHECK(g.eval(Point(std::vector<double>{0.5, 0.25})) == doctest::Approx(2.5));
  CHECK(g.eval(Point(std::vector<double>{-1.0, 1.0})) == doctest::Approx(1.0));
  CHECK_THROWS_AS(g.eval(Point(std::vector<double>{1.5, 0.0})), std::domain_error);

  GridData bad = data;
  bad.values.pop_back();
  CHECK_THROWS_AS(DistortionField::grid(bad), std::invalid_argument);
}

TEST_CASE("field inversion about the origin") {
  // a constant coefficient is inversion-invariant
  const auto c = invert_about_origin(DistortionField::constant(3.0, 2));
  CHECK(c.eval(Point(std::vector<double>{5.0, 0.0})) == doctest::Approx(3.0));

  // |x| about infinity pulls back to 1/|y| about 0
  const auto rad = invert_about_origin(
      DistortionField::radial([](double r) { return r; }, Point::origin(2), {}, "r"));
  CHECK(rad.radial_value(0.25) == doctest::Approx(4.0));
  CHECK(rad.eval(Point(std::vector<double>{0.5, 0.0})) == doctest::Approx(2.0));

  const auto gen = invert_about_origin(DistortionField::analytic(
      [](const Point& x) { return x.norm(); }, 2, Domain::space(2), "|x|"));
  CHECK(gen.eval(Point(std::vector<double>{0.5, 0.0})) == doctest::Approx(2.0));
}

TEST_CASE("mean profile interpolation falls back between samples") {
  MeanProfile prof;
  prof.radii = {0.1, 1.0};
  prof.values = {2.0, 2.0};
  CHECK(prof.q(0.5) == doctest::Approx(2.0));
  CHECK_THROWS_AS(prof.q(0.01), std::domain_error);
}
