#pragma once

#include "geode/expr.hpp"
#include "geode/surface.hpp"
#include "geode/trajectory.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace geode::testing {

// ---------------------------------------------------------------------------
// Finite-difference oracle for eval_jet2, built on plain value evaluation
// only; independent of the jet-propagation path it checks.
// ---------------------------------------------------------------------------

struct FdJet {
  double value;
  Vec3 gradient;
  Mat3 hessian;
};

inline FdJet fd_jet2(const Expression& e, const Vec3& p, double h) {
  FdJet out;
  out.value = eval_value(e, p);
  auto at = [&](double dx, double dy, double dz) {
    return eval_value(e, p + Vec3(dx, dy, dz));
  };
  for (int i = 0; i < 3; ++i) {
    Vec3 step = Vec3::Zero();
    step[i] = h;
    out.gradient[i] = (eval_value(e, p + step) - eval_value(e, p - step)) / (2 * h);
    out.hessian(i, i) =
        (eval_value(e, p + step) - 2 * out.value + eval_value(e, p - step)) / (h * h);
  }
  auto cross = [&](int i, int j) {
    Vec3 si = Vec3::Zero(), sj = Vec3::Zero();
    si[i] = h;
    sj[j] = h;
    return (eval_value(e, p + si + sj) - eval_value(e, p + si - sj) -
            eval_value(e, p - si + sj) + eval_value(e, p - si - sj)) /
           (4 * h * h);
  };
  out.hessian(0, 1) = out.hessian(1, 0) = cross(0, 1);
  out.hessian(0, 2) = out.hessian(2, 0) = cross(0, 2);
  out.hessian(1, 2) = out.hessian(2, 1) = cross(1, 2);
  (void)at;
  return out;
}

// ---------------------------------------------------------------------------
// Random well-conditioned expressions over x, y, z: polynomials and trig with
// guarded sqrt/ln/div so random points in [-1,1]^3 stay in-domain and values
// stay O(1).
// ---------------------------------------------------------------------------

inline std::string random_expression(std::mt19937& rng, int depth = 3) {
  std::uniform_int_distribution<int> pick(0, 9);
  std::uniform_real_distribution<double> coef(-1.5, 1.5);
  std::uniform_int_distribution<int> var(0, 2);
  auto leaf = [&]() -> std::string {
    switch (pick(rng) % 3) {
      case 0: return std::string(1, "xyz"[var(rng)]);
      case 1: return format_double(coef(rng));
      default: return std::string(1, "xyz"[var(rng)]);
    }
  };
  if (depth == 0) return leaf();
  const std::string a = random_expression(rng, depth - 1);
  const std::string b = random_expression(rng, depth - 1);
  switch (pick(rng)) {
    case 0: return "(" + a + "+" + b + ")";
    case 1: return "(" + a + "-" + b + ")";
    case 2: return "(" + a + ")*(" + b + ")";
    case 3: return "sin(" + a + ")";
    case 4: return "cos(" + a + ")";
    case 5: return "atan(" + a + ")";
    case 6: return "(" + a + ")^2";
    case 7: return "sqrt(1.5+(" + a + ")^2)";
    case 8: return "(" + a + ")/(1.5+(" + b + ")^2)";
    default: return "ln(1.5+(" + a + ")^2)";
  }
}

inline Vec3 random_point(std::mt19937& rng, double box = 1.0) {
  std::uniform_real_distribution<double> u(-box, box);
  return Vec3(u(rng), u(rng), u(rng));
}

inline Vec3 random_unit(std::mt19937& rng) {
  std::normal_distribution<double> g;
  Vec3 v(g(rng), g(rng), g(rng));
  while (v.norm() < 1e-3) v = Vec3(g(rng), g(rng), g(rng));
  return v.normalized();
}

// ---------------------------------------------------------------------------
// Test surfaces
// ---------------------------------------------------------------------------

inline Surface unit_sphere_implicit() {
  return Surface::implicit(Expression::parse("x^2+y^2+z^2-1"));
}

inline Surface unit_cylinder_implicit() {
  return Surface::implicit(Expression::parse("x^2+y^2-1"));
}

inline Surface paraboloid_graph() {
  return Surface::graph(Expression::parse("(x^2+y^2)/2"));
}

inline Surface cone_revolution() {  // z = v, slope 1
  Surface s = Surface::revolution(Expression::parse("v"));
  DomainHints hints;
  hints.v = {{0.2, 3.0}};
  s.set_domain(hints);
  return s;
}

inline RuledFamily circular_cone_family() {  // z = sqrt(x^2+y^2) for x > 0
  return RuledFamily{Expression::parse("tan(w)"), Expression::parse("1/cos(w)"),
                     std::nullopt, std::nullopt};
}

inline RuledFamily cylinder_family() {  // y^2 + z^2 = 1, rulings along x
  return RuledFamily{Expression::parse("0"), Expression::parse("0"),
                     Expression::parse("cos(w)"), Expression::parse("sin(w)")};
}

// ---------------------------------------------------------------------------
// Analytic trajectories
// ---------------------------------------------------------------------------

/// Sample an analytic unit-speed curve into a Trajectory.
inline Trajectory analytic_trajectory(const std::function<Vec3(double)>& position,
                                      const std::function<Vec3(double)>& velocity,
                                      double length, double step) {
  Trajectory t;
  t.step = step;
  const long n = static_cast<long>(std::floor(length / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    GeodesicState g;
    g.s = k * step;
    g.position = position(g.s);
    g.velocity = velocity(g.s);
    t.samples.push_back(g);
    t.lambda.push_back(0.0);
    t.level_residual.push_back(0.0);
  }
  return t;
}

/// Great circle through e1 toward e2 (orthonormal pair).
inline Trajectory great_circle(const Vec3& e1, const Vec3& e2, double length,
                               double step) {
  return analytic_trajectory(
      [&](double s) { return std::cos(s) * e1 + std::sin(s) * e2; },
      [&](double s) { return -std::sin(s) * e1 + std::cos(s) * e2; }, length, step);
}

}  // namespace geode::testing
