#pragma once

#include "geode/expr.hpp"
#include "geode/quadrature.hpp"
#include "geode/surface.hpp"
#include "geode/trajectory.hpp"
#include "geode/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace geode {

struct PlaneFit {
  Vec3 normal;          // unit normal of the fitted plane through the origin
  double max_residual;  // max |point . normal| over the samples
};

/// Time series and drift statistics of a conserved quantity along a
/// trajectory. Never mutates the trajectory.
struct ConservationReport {
  std::string quantity;  // "plane-constant" | "cylinder-ratio" | "clairaut"
  std::vector<double> s;
  std::vector<double> values;
  double mean = 0.0;
  double max_abs_dev = 0.0;       // max |value - mean|
  double drift_per_unit_s = 0.0;  // least-squares slope of value against s
  std::size_t samples_used = 0;
  std::size_t samples_skipped = 0;
  std::optional<PlaneFit> plane;                    // plane-constant only
  std::optional<double> proportionality_max_err;    // cylinder-ratio only
};

/// First integral (z dx - x dz)/(y dx - x dy) of sphere geodesics, constant
/// along great circles; also fits the plane a x + b y + c z = 0 through the
/// samples by least squares. Samples with |y dx - x dy| < 1e-10 are skipped;
/// fewer than 90% usable samples is an error.
ConservationReport plane_constant(const Trajectory& t);

/// dz/ds along a cylinder geodesic (constant: height grows proportionally to
/// the base arc); cross-checks z(s) - z(0) = (dz/ds)(0) * s.
ConservationReport cylinder_ratio(const Trajectory& t);

/// Angular momentum x vy - y vx about the axis, constant along geodesics of
/// any surface of revolution.
ConservationReport clairaut_constant(const Trajectory& t);

/// Azimuth swept by a geodesic of a revolution surface between parallels
/// v0 and v1 (magnitude only; the caller applies the orientation sign):
///   dphi = (A dv)/(r v) sqrt((r^2 + v^2)/(v^2 - A^2)).
/// The endpoint singularity at v = A is removed by the substitution
/// v = sqrt(A^2 + xi^2); a vanishing-r upper endpoint (equator barrier) by
/// v = v1 - eta^2. Gauss-Legendre with `nodes` points per segment.
QuadratureResult revolution_quadrature(const Surface& revolution, double A, double v0,
                                       double v1, int nodes,
                                       double axis_epsilon = 1e-8);

/// Substitution record for the reduced slope equation: u = q/p, t (with
/// t^2 = p^2 + q^2), v = (q - pi p)/(p + pi q), w = v / sqrt(1 + t^2).
struct ReducedState {
  double u, t, w, v;
};

/// Throws GeometryError when p = 0 (u pole) or |p + pi q| is degenerate.
ReducedState reduced_state_from_slopes(double p, double q, double pi);

/// Inverse map: pi = (q - v p)/(p + v q).
double slope_from_reduced(double p, double q, double v);

struct WuQuadrature {
  double w1 = 0.0;
  double delta_arctan = 0.0;  // integral of du / ((1 + u^2) sqrt(1 + t(u)^2))
  QuadratureResult integral;
};

/// Advance w through dw/(1+w^2) = du/((1+u^2) sqrt(1+t(u)^2)), integrating in
/// arctan space. `t_of_u` may use any single variable as u. Throws
/// DomainError when the accumulated arctan leaves (-pi/2, pi/2)
/// (branch crossing; reported, never folded).
double reduced_wu_quadrature(const Expression& t_of_u, double u0, double u1, double w0,
                             int nodes);
WuQuadrature reduced_wu_quadrature_full(const Expression& t_of_u, double u0, double u1,
                                        double w0, int nodes);

}  // namespace geode
