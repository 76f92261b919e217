#include "geode/reduction.hpp"

#include "geode/tracer.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace geode;
namespace gt = geode::testing;

TEST_CASE("plane_constant") {
  SUBCASE("equatorial circle: constant 0, plane z = 0") {
    const Trajectory t = gt::great_circle(Vec3(1, 0, 0), Vec3(0, 1, 0), 2 * M_PI, 1e-2);
    const ConservationReport r = plane_constant(t);
    CHECK(r.mean == 0.0);
    CHECK(r.max_abs_dev == 0.0);
    REQUIRE(r.plane.has_value());
    CHECK((r.plane->normal - Vec3(0, 0, 1)).norm() < 1e-12);
    CHECK(r.plane->max_residual < 1e-12);
  }
  SUBCASE("circle in the plane y = z: constant 1") {
    const double c = 1.0 / std::sqrt(2.0);
    const Trajectory t = gt::analytic_trajectory(
        [&](double s) { return Vec3(std::cos(s), c * std::sin(s), c * std::sin(s)); },
        [&](double s) { return Vec3(-std::sin(s), c * std::cos(s), c * std::cos(s)); },
        2 * M_PI, 1e-2);
    const ConservationReport r = plane_constant(t);
    CHECK(std::abs(r.mean - 1.0) < 1e-12);
    CHECK(r.max_abs_dev < 1e-12);
    REQUIRE(r.plane.has_value());
    CHECK(std::abs(std::abs(r.plane->normal.dot(Vec3(0, 1, -1).normalized())) - 1.0) <
          1e-12);
  }
  SUBCASE("traced sphere geodesic: tiny drift, tight plane") {
    const Surface s = gt::unit_sphere_implicit();
    std::mt19937 rng(23);
    const GeodesicState start = make_state(s, gt::random_unit(rng), gt::random_unit(rng));
    const Trajectory t = trace(s, start, 2 * M_PI, 1e-3);
    const ConservationReport r = plane_constant(t);
    CHECK(r.max_abs_dev < 1e-7);
    CHECK(r.plane->max_residual < 1e-7);
    CHECK(r.samples_used + r.samples_skipped == t.samples.size());
  }
  SUBCASE("meridian circles are denominator-degenerate throughout") {
    const Trajectory t = gt::great_circle(Vec3(1, 0, 0), Vec3(0, 0, 1), 2.0, 1e-2);
    CHECK_THROWS_AS(plane_constant(t), GeometryError);
  }
}

TEST_CASE("cylinder_ratio") {
  const double c = 1.0 / std::sqrt(2.0);
  SUBCASE("helix keeps dz/ds = 1/sqrt(2)") {
    const Trajectory t = gt::analytic_trajectory(
        [&](double s) { return Vec3(std::cos(c * s), std::sin(c * s), c * s); },
        [&](double s) { return Vec3(-c * std::sin(c * s), c * std::cos(c * s), c); },
        10.0, 1e-2);
    const ConservationReport r = cylinder_ratio(t);
    CHECK(std::abs(r.mean - c) < 1e-14);
    CHECK(r.max_abs_dev < 1e-14);
    CHECK(*r.proportionality_max_err < 1e-8);
  }
  SUBCASE("base circle has ratio 0 and constant height") {
    const Trajectory t = gt::great_circle(Vec3(1, 0, 0), Vec3(0, 1, 0), 3.0, 1e-2);
    const ConservationReport r = cylinder_ratio(t);
    CHECK(r.mean == 0.0);
    CHECK(*r.proportionality_max_err == 0.0);
  }
  SUBCASE("vertical ruling has ratio 1 and no base arc") {
    const Surface cyl = gt::unit_cylinder_implicit();
    const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 0, 1), 0.0};
    const Trajectory t = trace(cyl, start, 2.0, 1e-2);
    const ConservationReport r = cylinder_ratio(t);
    CHECK(r.mean == 1.0);
    CHECK(r.max_abs_dev == 0.0);
    for (const auto& g : t.samples)
      CHECK((g.position - Vec3(1, 0, g.s)).norm() < 1e-12);
  }
}

TEST_CASE("clairaut_constant") {
  SUBCASE("meridians carry zero angular momentum") {
    const Surface parab = gt::paraboloid_graph();
    const GeodesicState start = make_state(parab, Vec3(1, 0, 0.5), Vec3(-1, 0, -1));
    const Trajectory t = trace(parab, start, 2.0, 1e-3);
    const ConservationReport r = clairaut_constant(t);
    CHECK(r.mean == 0.0);
    CHECK(r.max_abs_dev == 0.0);
  }
  SUBCASE("inclined great circle: constant cos(i)") {
    const double i = 0.6;
    const Trajectory t = gt::great_circle(
        Vec3(1, 0, 0), Vec3(0, std::cos(i), std::sin(i)), 2 * M_PI, 1e-2);
    const ConservationReport r = clairaut_constant(t);
    CHECK(std::abs(r.mean - std::cos(i)) < 1e-13);
    CHECK(r.max_abs_dev < 1e-13);
  }
  SUBCASE("traced paraboloid geodesic drifts below 1e-7 over length 10") {
    const Surface parab = gt::paraboloid_graph();
    const GeodesicState start = make_state(parab, Vec3(1, 0, 0.5), Vec3(0.3, 1, 0));
    const Trajectory t = trace(parab, start, 10.0, 1e-3);
    const ConservationReport r = clairaut_constant(t);
    CHECK(r.max_abs_dev < 1e-7);
  }
}

TEST_CASE("revolution_quadrature") {
  const Surface sphere = Surface::revolution(Expression::parse("sqrt(1-v^2)"));

  SUBCASE("sphere quarter-turn identity") {
    for (double A : {0.1, 0.5, 0.9}) {
      const QuadratureResult q = revolution_quadrature(sphere, A, A, 1.0, 128);
      CHECK(std::abs(q.value - M_PI_2) < 1e-6);
    }
  }
  SUBCASE("meridian: A = 0 integrates to zero") {
    const QuadratureResult q = revolution_quadrature(sphere, 0.0, 0.2, 0.9, 64);
    CHECK(q.value == 0.0);
  }
  SUBCASE("cone sweep matches the unrolled straight-line closed form") {
    // Unrolling the cone z = v maps a geodesic to a straight line; in polar
    // form the azimuth between parallels is sqrt(2) * (acos(A/v1) - acos(A/v0)).
    const Surface cone = gt::cone_revolution();
    const double A = 0.6, v0 = 0.7, v1 = 2.0;
    const double expected =
        std::sqrt(2.0) * (std::acos(A / v1) - std::acos(A / v0));
    const QuadratureResult q = revolution_quadrature(cone, A, v0, v1, 128);
    CHECK(std::abs(q.value - expected) < 1e-9);
  }
  SUBCASE("node-doubling estimates are honest and shrink") {
    const Surface cone = gt::cone_revolution();
    const QuadratureResult q32 = revolution_quadrature(cone, 0.5, 0.5, 2.0, 32);
    const QuadratureResult q64 = revolution_quadrature(cone, 0.5, 0.5, 2.0, 64);
    const QuadratureResult q128 = revolution_quadrature(cone, 0.5, 0.5, 2.0, 128);
    CHECK(std::abs(q64.value - q32.value) <= q32.est_error);
    CHECK(std::abs(q128.value - q64.value) <= q64.est_error);
    CHECK(std::abs(q128.value - q64.value) <= std::abs(q64.value - q32.value));
  }
  SUBCASE("quarter turn approached from a shifted lower endpoint") {
    // Starting at v0 = A + eps misses an O(sqrt(eps)) sliver of the sweep.
    const double A = 0.5;
    double previous = 1.0;
    for (double eps : {1e-6, 1e-8, 1e-10}) {
      const QuadratureResult q = revolution_quadrature(sphere, A, A + eps, 1.0, 128);
      const double sliver_bound = 2.0 * std::sqrt(eps / (2.0 * A * (1.0 - A * A)));
      const double deviation = std::abs(q.value - M_PI_2);
      CHECK(deviation < sliver_bound + 1e-6);
      CHECK(deviation < previous);
      previous = deviation;
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(revolution_quadrature(sphere, -0.5, 0.5, 1.0, 64), GeometryError);
    CHECK_THROWS_AS(revolution_quadrature(sphere, 0.5, 0.9, 0.6, 64), GeometryError);
    CHECK_THROWS_AS(revolution_quadrature(sphere, 0.5, 0.2, 1.0, 64), GeometryError);
    CHECK_THROWS_AS(revolution_quadrature(sphere, 0.5, 1e-13, 1.0, 64), GeometryError);
    // the profile leaves its domain inside the interval
    CHECK_THROWS_AS(revolution_quadrature(sphere, 0.5, 0.6, 1.2, 64), GeometryError);
    // a coefficient sign change inside the interval
    const Surface bulge = Surface::revolution_coefficient(Expression::parse("v-1"));
    CHECK_THROWS_AS(revolution_quadrature(bulge, 0.3, 0.5, 1.5, 64), GeometryError);
    const Surface graph = gt::paraboloid_graph();
    CHECK_THROWS_AS(revolution_quadrature(graph, 0.3, 0.5, 1.5, 64), GeometryError);
  }
}

TEST_CASE("reduced_wu_quadrature") {
  SUBCASE("constant slope magnitude reproduces the angle-compression closed form") {
    for (double t0 : {0.5, 1.0, 2.0}) {
      const Expression t_of_u = Expression::parse(format_double(t0));
      const double u0 = -0.4, u1 = 1.3, w0 = 0.2;
      const double w1 = reduced_wu_quadrature(t_of_u, u0, u1, w0, 128);
      const double expected = std::tan(
          std::atan(w0) + (std::atan(u1) - std::atan(u0)) / std::sqrt(1.0 + t0 * t0));
      CHECK(std::abs(w1 - expected) < 1e-10);
    }
  }
  SUBCASE("empty interval is the identity") {
    const Expression t_of_u = Expression::parse("v^2");
    CHECK(reduced_wu_quadrature(t_of_u, 0.7, 0.7, 0.31, 64) == 0.31);
  }
  SUBCASE("flat case degenerates to equal arctan increments") {
    const Expression zero = Expression::parse("0");
    const double w1 = reduced_wu_quadrature(zero, 0.0, 1.0, 0.0, 128);
    CHECK(std::abs(std::atan(w1) - std::atan(1.0)) < 1e-13);
  }
  SUBCASE("branch crossings are reported, not folded") {
    const Expression zero = Expression::parse("0");
    CHECK_THROWS_AS(reduced_wu_quadrature(zero, 0.0, 10.0, std::tan(1.5), 128),
                    DomainError);
  }
  SUBCASE("the slope formula must use a single variable") {
    CHECK_THROWS_AS(reduced_wu_quadrature(Expression::parse("x+y"), 0, 1, 0, 32),
                    DomainError);
  }
  SUBCASE("cone direction field matches the 3D tracer") {
    // On z = sqrt(x^2+y^2) the tangent-plane slopes are p = cos(phi),
    // q = sin(phi) (slope magnitude 1), so t(u) = 1 and u = tan(phi).
    const Surface cone = gt::cone_revolution();
    const GeodesicState start = make_state(cone, Vec3(1.2, 0, 1.2), Vec3(0.2, 1.0, 0.2));
    const Trajectory t = trace(cone, start, 0.8, 1e-3);
    const Expression t_of_u = Expression::parse("1");

    const auto slopes_at = [](const GeodesicState& g) {
      const double phi = std::atan2(g.position.y(), g.position.x());
      return SlopePair{std::cos(phi), std::sin(phi)};
    };
    const SlopePair s0 = slopes_at(t.samples.front());
    const double pi0 = t.samples.front().velocity.y() / t.samples.front().velocity.x();
    const ReducedState r0 = reduced_state_from_slopes(s0.p, s0.q, pi0);

    double worst = 0.0;
    for (std::size_t k = 10; k < t.samples.size(); k += 50) {
      const GeodesicState& g = t.samples[k];
      const SlopePair sk = slopes_at(g);
      const double uk = sk.q / sk.p;
      const double wk = reduced_wu_quadrature(t_of_u, r0.u, uk, r0.w, 256);
      const double vk = wk * std::sqrt(2.0);
      const double predicted = slope_from_reduced(sk.p, sk.q, vk);
      const double actual = g.velocity.y() / g.velocity.x();
      worst = std::max(worst, std::abs(predicted - actual));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("reduced_state_from_slopes") {
  SUBCASE("unit example") {
    const ReducedState st = reduced_state_from_slopes(1.0, 0.0, 0.0);
    CHECK(st.v == 0.0);
    CHECK(st.u == 0.0);
    CHECK(st.t == 1.0);
    CHECK(st.w == 0.0);
  }
  SUBCASE("p = 0 is a pole of u") {
    CHECK_THROWS_AS(reduced_state_from_slopes(0.0, 1.0, 0.5), GeometryError);
  }
  SUBCASE("degenerate denominator") {
    CHECK_THROWS_AS(reduced_state_from_slopes(1.0, -1.0, 1.0), GeometryError);
  }
  SUBCASE("round trip recovers the slope and the w-identity holds") {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    int done = 0;
    while (done < 200) {
      const double p = u(rng), q = u(rng), pi = u(rng);
      ReducedState st;
      try {
        st = reduced_state_from_slopes(p, q, pi);
      } catch (const GeometryError&) {
        continue;
      }
      ++done;
      CHECK(std::abs(slope_from_reduced(p, q, st.v) - pi) <
            1e-12 * std::max(1.0, std::abs(pi)));
      CHECK(std::abs(st.v - st.w * std::sqrt(1.0 + st.t * st.t)) < 1e-12);
    }
  }
}
