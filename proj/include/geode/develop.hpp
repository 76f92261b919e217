#pragma once

#include "geode/surface.hpp"
#include "geode/trajectory.hpp"
#include "geode/types.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace geode {

/// Planar image of points of a cone or developable ruled surface under
/// isometric unrolling. Distances along each ruling are preserved exactly;
/// geodesics map to straight lines (quantified by `straightness`).
struct DevelopmentMap {
  std::string family;            // "cone" | "developable"
  std::vector<Vec2> image;       // (xi, eta)
  std::vector<double> s;         // input arc length (or cumulative 3D length)
  std::vector<double> omega;     // ruling parameter per point
  std::vector<double> rho;       // distance along the ruling (cone: from apex)
  std::vector<double> theta;     // cumulative ruling angle per point
  double straightness = 0.0;

  /// CSV with header `s,xi,eta,omega,rho`.
  void write_csv(std::ostream& out) const;
};

/// Unroll a cone (rulings through the origin): each point maps to polar
/// coordinates (rho, theta) with rho the apex distance and theta the
/// cumulative angle swept by the unit ruling direction. Points must lie on
/// the cone to 1e-8 relative; apex distances below 1e-6 are rejected.
DevelopmentMap develop_cone(const RuledFamily& cone, std::span<const Vec3> points,
                            std::span<const double> arc_lengths = {},
                            std::array<double, 2> omega_range = {-1.25, 1.25},
                            double theta0 = 0.0);

/// Unroll a validated developable family along a trajectory: rulings are
/// laid out sequentially, preserving the exact turn of the unit ruling
/// direction and the chord lengths of the directrix, and each sample keeps
/// its distance along its ruling. `psi0`/`origin` fix the planar placement.
DevelopmentMap develop_ruled(const RuledFamily& family, const Trajectory& t,
                             std::array<double, 2> omega_range = {-1.25, 1.25},
                             double psi0 = 0.0, const Vec2& origin = Vec2::Zero());

/// Max orthogonal distance to the total-least-squares line divided by the
/// polyline length. Needs at least 3 points.
double straightness_residual(std::span<const Vec2> points);

/// Max pointwise distance between two planar point sets after the optimal
/// rigid alignment (rotation + translation, no scaling).
double procrustes_max_distance(std::span<const Vec2> a, std::span<const Vec2> b);

/// Developed turn of the unit ruling direction between two parameter values:
/// the integral of |d/dw of the unit direction|, signed by the direction of
/// integration and the surface orientation.
double ruling_turn(const RuledFamily& family, double omega_a, double omega_b);

}  // namespace geode
