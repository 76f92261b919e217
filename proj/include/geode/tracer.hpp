#pragma once

#include "geode/surface.hpp"
#include "geode/trajectory.hpp"
#include "geode/types.hpp"

#include <vector>

namespace geode {

/// Integrate the geodesic initial-value problem with classical fixed-step
/// RK4 on acceleration = lambda * n, lambda = -(v^T J v)/(n.n). After each
/// step the velocity is renormalized, the position re-projected when the
/// family has a level function, and the velocity re-tangentialized.
///
/// `start` must be on-surface, unit-speed and tangent to within 1e-6; it is
/// sharpened to machine precision before integration.
Trajectory trace(const Surface& surface, const GeodesicState& start, double length,
                 double step);

/// Sharpen an arbitrary position/direction pair into a valid start state:
/// project the position (families with a level function), remove the
/// direction's normal component, and normalize.
GeodesicState make_state(const Surface& surface, const Vec3& position,
                         const Vec3& direction);

/// Sample of the scalar graph-form geodesic equation: y and slope p = dy/dx
/// advanced in x, with accumulated arc length s.
struct GraphOdeSample {
  double x, y, p, s;
};

struct GraphTrajectory {
  std::vector<GraphOdeSample> samples;
  std::vector<Vec3> lifted;  // (x, y, zeta(x, y))
  double step = 0.0;
};

/// Geodesics of z = zeta(x,y) as a second-order ODE in x:
///   dy/dx = p,
///   dp/dx = -(g - f p) ((alpha + beta p) + p (beta + gamma p)) / (1 + f^2 + g^2)
/// with (f, g) the first and (alpha, beta, gamma) the second slopes of zeta.
/// Arc length accumulates through ds/dx = sqrt(1 + p^2 + (f + g p)^2).
/// Throws GeometryError when |p| exceeds 1e6 (loss of x-graphability).
GraphTrajectory trace_graph_ode(const GraphSurface& graph, double x0, double y0,
                                double p0, double x1, double step);

/// Arc-length element per unit x on a graph surface at slope p.
double graph_arc_element(const GraphSurface& graph, double x, double y, double p);

enum class ResidualForm { Symmetric, XParam, PhiParam };

/// Finite-difference residual of one of the equivalent geodesic equation
/// forms, computed from emitted samples only (centered 3-point stencils,
/// endpoints excluded).
struct ResidualReport {
  ResidualForm form;
  std::vector<double> residuals;  // interior samples, aligned to samples[1..n-2]
  double max_abs = 0.0;
  /// Companion identity residual: f dx + g dy + h dz for the symmetric form,
  /// p + q t + r u (x-form) or f t + g u + h v (arc-length form) otherwise.
  double identity_max = 0.0;
};

/// Symmetric coordinate form ddx (q dz - r dy) + ddy (r dx - p dz)
/// + ddz (p dy - q dx) = 0 evaluated by centered differences.
ResidualReport euler_equation_residual(const Trajectory& t, const Surface& s);

/// x-parametrized form dt (r - p u) + du (p t - q) = 0 with t = dy/dx,
/// u = dz/dx (requires dx/ds bounded away from zero), or the arc-length
/// parametrized form p (u dv - v du) + q (v dt - t dv) + r (t du - u dt) = 0
/// with (t, u, v) the velocity components.
ResidualReport param_form_residual(const Trajectory& t, const Surface& s,
                                   ResidualForm form);

/// Ratio max-residual(step) / max-residual(step/2) for a freshly traced
/// geodesic; about 4 for the second-order stencils used here.
double residual_halving_factor(const Surface& s, const GeodesicState& start,
                               double length, double step, ResidualForm form);

}  // namespace geode
