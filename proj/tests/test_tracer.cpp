#include "geode/tracer.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace geode;
namespace gt = geode::testing;

TEST_CASE("trace: unit-sphere great circle") {
  const Surface s = gt::unit_sphere_implicit();
  const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0};
  const Trajectory t = trace(s, start, M_PI, 1e-3);

  CHECK((t.samples.back().position - Vec3(-1, 0, 0)).norm() < 1e-6);
  double max_z = 0.0, max_level = 0.0, max_speed_err = 0.0, max_tangency = 0.0;
  for (const auto& g : t.samples) {
    max_z = std::max(max_z, std::abs(g.position.z()));
    max_speed_err = std::max(max_speed_err, std::abs(g.velocity.norm() - 1.0));
    const Vec3 n = s.normal_at(g.position);
    max_tangency = std::max(max_tangency, std::abs(n.dot(g.velocity)) / n.norm());
  }
  for (double r : t.level_residual) max_level = std::max(max_level, std::abs(r));
  CHECK(max_z < 1e-6);          // stays in the plane z = 0
  CHECK(max_level < 1e-9);      // constraint maintained
  CHECK(max_speed_err < 1e-9);  // unit speed maintained
  CHECK(max_tangency < 1e-9);   // tangency maintained
}

TEST_CASE("trace: plane graph is a straight line to rounding") {
  const Surface s = Surface::graph(Expression::parse("0"));
  const GeodesicState start{Vec3(0, 0, 0), Vec3(1, 0, 0), 0.0};
  const Trajectory t = trace(s, start, 2.0, 1e-2);
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    CHECK((t.samples[k].position - Vec3(t.samples[k].s, 0, 0)).norm() < 1e-12);
    CHECK(t.lambda[k] == 0.0);
  }
}

TEST_CASE("trace: cylinder helix obeys the closed form") {
  const Surface s = gt::unit_cylinder_implicit();
  const double c = 1.0 / std::sqrt(2.0);
  const GeodesicState start{Vec3(1, 0, 0), Vec3(0, c, c), 0.0};
  const double length = 2.0 * M_PI * std::sqrt(2.0);
  const Trajectory t = trace(s, start, length, 1e-3);

  CHECK((t.samples.back().position - Vec3(1, 0, 2 * M_PI)).norm() < 1e-6);
  double max_err = 0.0;
  for (const auto& g : t.samples)
    max_err = std::max(max_err, std::abs(g.position.z() - c * g.s));
  CHECK(max_err < 1e-8);
}

TEST_CASE("trace: sample grid is uniform with an exact final partial step") {
  const Surface s = gt::unit_sphere_implicit();
  const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0};
  const Trajectory t = trace(s, start, 0.0105, 1e-3);
  REQUIRE(t.samples.size() == 12);  // 10 full steps + partial + start
  for (std::size_t k = 1; k + 1 < t.samples.size(); ++k)
    CHECK(std::abs(t.samples[k].s - t.samples[k - 1].s - 1e-3) < 1e-12);
  CHECK(t.samples.back().s == 0.0105);
}

TEST_CASE("trace: acceleration stays parallel to the normal at second order") {
  const Surface s = gt::unit_sphere_implicit();
  std::mt19937 rng(17);
  const Vec3 pos = gt::random_unit(rng);
  const GeodesicState start = make_state(s, pos, gt::random_unit(rng));

  auto max_sine = [&](double step) {
    const Trajectory t = trace(s, start, 1.0, step);
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
      const double h = 0.5 * (t.samples[k + 1].s - t.samples[k - 1].s);
      const Vec3 a = (t.samples[k + 1].position - 2.0 * t.samples[k].position +
                      t.samples[k - 1].position) /
                     (h * h);
      const Vec3 n = s.normal_at(t.samples[k].position);
      worst = std::max(worst, a.cross(n).norm() / (a.norm() * n.norm()));
    }
    return worst;
  };
  const double coarse = max_sine(2e-3);
  const double fine = max_sine(1e-3);
  CHECK(fine < 1e-4);
  CHECK(coarse / fine > 2.0);  // tightens at roughly second order
}

TEST_CASE("trace: reversibility") {
  const Surface s = gt::paraboloid_graph();
  const GeodesicState start = make_state(s, Vec3(1.0, -0.3, 0.0), Vec3(0.2, 1.0, 0.4));
  const Trajectory forward = trace(s, start, 5.0, 1e-3);
  GeodesicState back = forward.samples.back();
  back.velocity = -back.velocity;
  back.s = 0.0;
  const Trajectory reverse = trace(s, back, 5.0, 1e-3);
  CHECK((reverse.samples.back().position - start.position).norm() < 1e-6);
}

TEST_CASE("trace: precondition violations") {
  const Surface s = gt::unit_sphere_implicit();
  const GeodesicState ok{Vec3(1, 0, 0), Vec3(0, 1, 0), 0.0};
  CHECK_THROWS_AS(trace(s, ok, 1.0, 0.0), GeometryError);
  CHECK_THROWS_AS(trace(s, ok, 0.0, 1e-3), GeometryError);
  CHECK_THROWS_AS(trace(s, GeodesicState{Vec3(1.1, 0, 0), Vec3(0, 1, 0), 0.0}, 1, 1e-3),
                  GeometryError);
  CHECK_THROWS_AS(trace(s, GeodesicState{Vec3(1, 0, 0), Vec3(0.5, 1, 0), 0.0}, 1, 1e-3),
                  GeometryError);
  CHECK_THROWS_AS(trace(s, GeodesicState{Vec3(1, 0, 0), Vec3(0, 2, 0), 0.0}, 1, 1e-3),
                  GeometryError);
}

TEST_CASE("trace_graph_ode: plane slopes stay straight") {
  const GraphSurface plane{Expression::parse("0.4*x+0.7*y")};
  const GraphTrajectory t = trace_graph_ode(plane, 0.0, 0.2, 0.5, 1.0, 1e-3);
  for (const auto& sample : t.samples) {
    CHECK(std::abs(sample.p - 0.5) < 1e-13);
    CHECK(std::abs(sample.y - (0.2 + 0.5 * sample.x)) < 1e-13);
  }
  // arc length accumulates through the graph line element
  const double expected_rate = std::sqrt(1.0 + 0.25 + std::pow(0.4 + 0.7 * 0.5, 2));
  CHECK(t.samples.back().s == doctest::Approx(expected_rate * 1.0).epsilon(1e-12));
  CHECK(graph_arc_element(plane, 0.3, 0.1, 0.5) ==
        doctest::Approx(expected_rate).epsilon(1e-15));
}

TEST_CASE("trace_graph_ode: meridian symmetry on the paraboloid") {
  const GraphSurface parab{Expression::parse("(x^2+y^2)/2")};
  const GraphTrajectory t = trace_graph_ode(parab, 0.1, 0.0, 0.0, 1.1, 1e-3);
  for (const auto& sample : t.samples) {
    CHECK(sample.y == 0.0);
    CHECK(sample.p == 0.0);
  }
}

TEST_CASE("trace_graph_ode: agrees with the 3D tracer on a sphere cap") {
  const GraphSurface cap{Expression::parse("sqrt(1-x^2-y^2)")};
  const Surface sphere = gt::unit_sphere_implicit();

  const double x0 = 0.1, y0 = -0.15;
  const Vec3 p0(x0, y0, std::sqrt(1 - x0 * x0 - y0 * y0));
  const GeodesicState start = make_state(sphere, p0, Vec3(1.0, 0.35, 0.0));
  REQUIRE(start.velocity.x() > 0.5);
  const Trajectory t3 = trace(sphere, start, 1.0, 1e-3);

  const double slope0 = start.velocity.y() / start.velocity.x();
  const GraphTrajectory tg = trace_graph_ode(cap, x0, y0, slope0, x0 + 0.8, 5e-4);

  double worst = 0.0;
  for (std::size_t k = 0; k < tg.samples.size(); ++k) {
    if (tg.samples[k].s > 1.0) break;
    worst = std::max(worst, (tg.lifted[k] - t3.position_at(tg.samples[k].s)).norm());
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("trace_graph_ode: blow-up guard reports loss of graphability") {
  // A great circle away from the poles turns vertical in y(x) inside the cap.
  const GraphSurface cap{Expression::parse("sqrt(1-x^2-y^2)")};
  CHECK_THROWS_AS(trace_graph_ode(cap, 0.5, 0.0, 3.0, 0.95, 1e-3), GeometryError);
}

TEST_CASE("euler_equation_residual") {
  const Surface s = gt::unit_sphere_implicit();

  SUBCASE("analytic great-circle samples sit at finite-difference noise") {
    const Trajectory t = gt::great_circle(Vec3(1, 0, 0), Vec3(0, 1, 0), 2.0, 1e-3);
    const ResidualReport report = euler_equation_residual(t, s);
    CHECK(report.max_abs < 1e-5);
    CHECK(report.identity_max < 1e-12);
  }
  SUBCASE("halving the step divides the residual by about four") {
    const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 0.6, 0.8), 0.0};
    const double factor =
        residual_halving_factor(s, start, 2.0, 2e-3, ResidualForm::Symmetric);
    CHECK(factor > 3.0);
    CHECK(factor < 5.0);
  }
  SUBCASE("straight lines on a plane have zero residual") {
    const Surface plane = Surface::graph(Expression::parse("0"));
    const Trajectory t = gt::analytic_trajectory(
        [](double s) { return Vec3(s * 0.6, s * 0.8, 0.0); },
        [](double) { return Vec3(0.6, 0.8, 0.0); }, 2.0, 1e-2);
    const ResidualReport report = euler_equation_residual(t, plane);
    CHECK(report.max_abs < 1e-12);
  }
  SUBCASE("too few samples is an error") {
    Trajectory t = gt::great_circle(Vec3(1, 0, 0), Vec3(0, 1, 0), 2.0, 1e-3);
    t.samples.resize(2);
    CHECK_THROWS_AS(euler_equation_residual(t, s), GeometryError);
  }
}

TEST_CASE("param_form_residual") {
  const Surface cyl = gt::unit_cylinder_implicit();
  const double c = 1.0 / std::sqrt(2.0);

  SUBCASE("x-parametrized form on a helix window away from turning points") {
    const double phi0 = 3.6;
    const GeodesicState start{Vec3(std::cos(phi0), std::sin(phi0), 0.0),
                              Vec3(-c * std::sin(phi0), c * std::cos(phi0), c), 0.0};
    const double window = 0.9 * (M_PI / 2.0) * std::sqrt(2.0);
    const Trajectory t = trace(cyl, start, window, 1e-3);
    const ResidualReport report = param_form_residual(t, cyl, ResidualForm::XParam);
    CHECK(report.max_abs < 1e-3);
    CHECK(report.identity_max < 1e-9);  // p + q t + r u = 0 per sample
    const double factor =
        residual_halving_factor(cyl, start, window, 2e-3, ResidualForm::XParam);
    CHECK(factor > 3.0);
    CHECK(factor < 5.0);
  }
  SUBCASE("x-parametrized form rejects trajectories with dx/ds = 0") {
    const GeodesicState start{Vec3(1, 0, 0), Vec3(0, c, c), 0.0};
    const Trajectory t = trace(cyl, start, 2.0, 1e-3);  // starts with vx = 0
    CHECK_THROWS_AS(param_form_residual(t, cyl, ResidualForm::XParam), GeometryError);
  }
  SUBCASE("arc-length form matches the symmetric form at unit speed") {
    const Surface sphere = gt::unit_sphere_implicit();
    const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 0.6, 0.8), 0.0};
    const Trajectory t = trace(sphere, start, 2.0, 1e-3);
    const ResidualReport sym = euler_equation_residual(t, sphere);
    const ResidualReport phi = param_form_residual(t, sphere, ResidualForm::PhiParam);
    CHECK(phi.max_abs < 1e-4);
    CHECK(phi.max_abs / sym.max_abs > 0.2);
    CHECK(phi.max_abs / sym.max_abs < 5.0);
    CHECK(phi.identity_max < 1e-12);
  }
  SUBCASE("meridians of a revolution surface have exactly zero residual") {
    const Surface cone = gt::cone_revolution();
    const GeodesicState start = make_state(cone, Vec3(1, 0, 1), Vec3(1, 0, 1));
    const Trajectory t = trace(cone, start, 1.0, 1e-3);
    const ResidualReport report = param_form_residual(t, cone, ResidualForm::PhiParam);
    CHECK(report.max_abs == 0.0);
  }
}

TEST_CASE("trajectory CSV round-trips bitwise") {
  const Surface s = gt::unit_sphere_implicit();
  const GeodesicState start{Vec3(1, 0, 0), Vec3(0, 0.8, 0.6), 0.0};
  const Trajectory t = trace(s, start, 0.5, 1e-2);

  std::ostringstream first;
  t.write_csv(first);
  std::istringstream in(first.str());
  const Trajectory back = Trajectory::read_csv(in);
  REQUIRE(back.samples.size() == t.samples.size());
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    CHECK(back.samples[k].position == t.samples[k].position);
    CHECK(back.samples[k].velocity == t.samples[k].velocity);
    CHECK(back.samples[k].s == t.samples[k].s);
    CHECK(back.lambda[k] == t.lambda[k]);
    CHECK(back.level_residual[k] == t.level_residual[k]);
  }
  std::ostringstream second;
  back.write_csv(second);
  CHECK(second.str() == first.str());
  std::istringstream bad("nonsense\n1,2,3\n");
  CHECK_THROWS_AS(Trajectory::read_csv(bad), ParseError);
}

TEST_CASE("make_state sharpens tangency and unit speed") {
  const Surface s = gt::paraboloid_graph();
  const GeodesicState g = make_state(s, Vec3(0.7, -0.4, 99.0), Vec3(3.0, 1.0, 0.0));
  CHECK(std::abs(s.level_at(g.position)) < 1e-12);
  CHECK(std::abs(g.velocity.norm() - 1.0) < 1e-15);
  const Vec3 n = s.normal_at(g.position);
  CHECK(std::abs(n.dot(g.velocity)) < 1e-14 * n.norm());
  CHECK_THROWS_AS(make_state(s, Vec3(0, 0, 0), Vec3(0, 0, 1)), GeometryError);
}
