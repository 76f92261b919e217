#include "geode/tracer.hpp"

#include <cmath>

namespace geode {

namespace {

struct Phase {
  Vec3 pos;
  Vec3 vel;
};

Phase operator+(const Phase& a, const Phase& b) { return {a.pos + b.pos, a.vel + b.vel}; }
Phase operator*(double c, const Phase& a) { return {c * a.pos, c * a.vel}; }

double lambda_multiplier(const Vec3& n, const Mat3& jac, const Vec3& vel) {
  return -vel.dot(jac * vel) / n.squaredNorm();
}

}  // namespace

GeodesicState make_state(const Surface& surface, const Vec3& position,
                         const Vec3& direction) {
  GeodesicState g;
  g.position = surface.has_level() ? surface.project(position) : position;
  const Vec3 n = surface.normal_at(g.position);
  Vec3 v = direction - (direction.dot(n) / n.squaredNorm()) * n;
  const double norm = v.norm();
  if (norm < 1e-12)
    throw GeometryError("direction is parallel to the surface normal");
  g.velocity = v / norm;
  g.s = 0.0;
  return g;
}

Trajectory trace(const Surface& surface, const GeodesicState& start, double length,
                 double step) {
  if (step <= 0.0) throw GeometryError("trace: step must be positive");
  if (length <= 0.0) throw GeometryError("trace: length must be positive");

  const bool has_level = surface.has_level();
  if (has_level && std::abs(surface.level_at(start.position)) > 1e-6)
    throw GeometryError("trace: start position is off-surface");
  {
    const Vec3 n0 = surface.normal_at(start.position);
    if (std::abs(start.velocity.dot(n0)) > 1e-6 * n0.norm() * start.velocity.norm())
      throw GeometryError("trace: start velocity is not tangent");
    if (std::abs(start.velocity.norm() - 1.0) > 1e-6)
      throw GeometryError("trace: start velocity is not unit length");
  }

  Trajectory out;
  out.step = step;
  out.surface_kind = surface.kind_name();

  const long full_steps = static_cast<long>(std::floor(length / step + 1e-9));
  const double remainder = length - static_cast<double>(full_steps) * step;
  const bool partial = remainder > 1e-9 * step;
  out.samples.reserve(full_steps + 2);

  // Sharpened start: exactly unit, exactly tangent at machine precision.
  GeodesicState state = start;
  if (has_level) state.position = surface.project(state.position);
  std::optional<double> warm_omega;
  {
    const auto nd = surface.normal_data(state.position, warm_omega);
    warm_omega = nd.omega;
    state.velocity -= (state.velocity.dot(nd.n) / nd.n.squaredNorm()) * nd.n;
    state.velocity.normalize();
    out.samples.push_back(state);
    out.lambda.push_back(lambda_multiplier(nd.n, nd.jacobian, state.velocity));
    out.level_residual.push_back(surface.constraint_residual(state.position));
  }

  auto rhs = [&](const Phase& y) -> Phase {
    const auto nd = surface.normal_data(y.pos, warm_omega);
    warm_omega = nd.omega;
    return {y.vel, lambda_multiplier(nd.n, nd.jacobian, y.vel) * nd.n};
  };

  const long total_steps = full_steps + (partial ? 1 : 0);
  for (long k = 0; k < total_steps; ++k) {
    const double h = (k < full_steps) ? step : remainder;
    Phase y{state.position, state.velocity};
    const Phase k1 = rhs(y);
    const Phase k2 = rhs(y + (0.5 * h) * k1);
    const Phase k3 = rhs(y + (0.5 * h) * k2);
    const Phase k4 = rhs(y + h * k3);
    y = y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4);

    if (has_level) y.pos = surface.project(y.pos);
    const auto nd = surface.normal_data(y.pos, warm_omega);
    warm_omega = nd.omega;
    y.vel -= (y.vel.dot(nd.n) / nd.n.squaredNorm()) * nd.n;
    y.vel.normalize();

    state.position = y.pos;
    state.velocity = y.vel;
    state.s = (k + 1 <= full_steps) ? (k + 1) * step : length;
    out.samples.push_back(state);
    out.lambda.push_back(lambda_multiplier(nd.n, nd.jacobian, y.vel));
    out.level_residual.push_back(surface.constraint_residual(y.pos));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scalar graph-form tracer
// ---------------------------------------------------------------------------

double graph_arc_element(const GraphSurface& graph, double x, double y, double p) {
  const Jet2 z = eval_jet2(graph.zeta, Vec3(x, y, 0.0));
  const double fg = z.g[0] + z.g[1] * p;
  return std::sqrt(1.0 + p * p + fg * fg);
}

GraphTrajectory trace_graph_ode(const GraphSurface& graph, double x0, double y0,
                                double p0, double x1, double step) {
  if (step <= 0.0) throw GeometryError("trace_graph_ode: step must be positive");
  if (x1 <= x0) throw GeometryError("trace_graph_ode: x1 must exceed x0");

  struct State {
    double y, p, s;
  };
  auto rhs = [&](double x, const State& st) -> State {
    const Jet2 z = eval_jet2(graph.zeta, Vec3(x, st.y, 0.0));
    const double f = z.g[0], g = z.g[1];
    const double alpha = z.hess(0, 0), beta = z.hess(0, 1), gamma = z.hess(1, 1);
    const double slope_rate = (alpha + beta * st.p) + st.p * (beta + gamma * st.p);
    const double dp = -(g - f * st.p) * slope_rate / (1.0 + f * f + g * g);
    const double fg = f + g * st.p;
    return {st.p, dp, std::sqrt(1.0 + st.p * st.p + fg * fg)};
  };

  GraphTrajectory out;
  out.step = step;
  const long full_steps = static_cast<long>(std::floor((x1 - x0) / step + 1e-9));
  const double remainder = (x1 - x0) - full_steps * step;
  const bool partial = remainder > 1e-9 * step;
  const long total = full_steps + (partial ? 1 : 0);

  State st{y0, p0, 0.0};
  double x = x0;
  auto emit = [&](double xv, const State& sv) {
    out.samples.push_back({xv, sv.y, sv.p, sv.s});
    out.lifted.emplace_back(xv, sv.y, eval_value(graph.zeta, Vec3(xv, sv.y, 0.0)));
  };
  emit(x, st);

  for (long k = 0; k < total; ++k) {
    const double h = (k < full_steps) ? step : remainder;
    const State k1 = rhs(x, st);
    const State k2 = rhs(x + 0.5 * h, {st.y + 0.5 * h * k1.y, st.p + 0.5 * h * k1.p, 0});
    const State k3 = rhs(x + 0.5 * h, {st.y + 0.5 * h * k2.y, st.p + 0.5 * h * k2.p, 0});
    const State k4 = rhs(x + h, {st.y + h * k3.y, st.p + h * k3.p, 0});
    st.y += h / 6.0 * (k1.y + 2.0 * (k2.y + k3.y) + k4.y);
    st.p += h / 6.0 * (k1.p + 2.0 * (k2.p + k3.p) + k4.p);
    st.s += h / 6.0 * (k1.s + 2.0 * (k2.s + k3.s) + k4.s);
    x = (k + 1 <= full_steps) ? x0 + (k + 1) * step : x1;
    if (std::abs(st.p) > 1e6)
      throw GeometryError("graph form lost x-graphability: |dy/dx| exceeded 1e6");
    emit(x, st);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Residual reports
// ---------------------------------------------------------------------------

ResidualReport euler_equation_residual(const Trajectory& t, const Surface& s) {
  if (t.samples.size() < 3)
    throw GeometryError("residual check needs at least 3 samples");
  ResidualReport report;
  report.form = ResidualForm::Symmetric;
  std::optional<double> warm;
  for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
    const Vec3& pm = t.samples[k - 1].position;
    const Vec3& p0 = t.samples[k].position;
    const Vec3& pp = t.samples[k + 1].position;
    const double h = 0.5 * (t.samples[k + 1].s - t.samples[k - 1].s);
    const Vec3 d = (pp - pm) / (2.0 * h);
    const Vec3 dd = (pp - 2.0 * p0 + pm) / (h * h);
    const auto nd = s.normal_data(p0, warm);
    warm = nd.omega;
    const Vec3& n = nd.n;
    // letters f = dy ddz - dz ddy etc. are the components of d x dd
    const Vec3 letters = d.cross(dd);
    const double residual = letters.dot(n);
    report.residuals.push_back(residual);
    report.max_abs = std::max(report.max_abs, std::abs(residual));
    report.identity_max = std::max(report.identity_max, std::abs(letters.dot(d)));
  }
  return report;
}

ResidualReport param_form_residual(const Trajectory& t, const Surface& s,
                                   ResidualForm form) {
  if (form == ResidualForm::Symmetric) return euler_equation_residual(t, s);
  if (t.samples.size() < 3)
    throw GeometryError("residual check needs at least 3 samples");

  ResidualReport report;
  report.form = form;
  std::optional<double> warm;

  if (form == ResidualForm::XParam) {
    for (const auto& g : t.samples)
      if (std::abs(g.velocity.x()) < 1e-6)
        throw GeometryError("x-parametrized form: dx/ds vanishes along the trajectory");
    std::vector<double> tt(t.samples.size()), uu(t.samples.size());
    for (std::size_t k = 0; k < t.samples.size(); ++k) {
      tt[k] = t.samples[k].velocity.y() / t.samples[k].velocity.x();
      uu[k] = t.samples[k].velocity.z() / t.samples[k].velocity.x();
    }
    for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
      const double h2 = t.samples[k + 1].s - t.samples[k - 1].s;
      const double dt = (tt[k + 1] - tt[k - 1]) / h2;
      const double du = (uu[k + 1] - uu[k - 1]) / h2;
      const auto nd = s.normal_data(t.samples[k].position, warm);
      warm = nd.omega;
      const double p = nd.n[0], q = nd.n[1], r = nd.n[2];
      const double residual = dt * (r - p * uu[k]) + du * (p * tt[k] - q);
      report.residuals.push_back(residual);
      report.max_abs = std::max(report.max_abs, std::abs(residual));
      report.identity_max =
          std::max(report.identity_max, std::abs(p + q * tt[k] + r * uu[k]));
    }
    return report;
  }

  // Arc-length parametrized form: (t, u, v) are the velocity components and
  // the bracketed combinations assemble to n . (V x dV/ds).
  for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
    const double h2 = t.samples[k + 1].s - t.samples[k - 1].s;
    const Vec3 vel = t.samples[k].velocity;
    const Vec3 dvel = (t.samples[k + 1].velocity - t.samples[k - 1].velocity) / h2;
    const auto nd = s.normal_data(t.samples[k].position, warm);
    warm = nd.omega;
    const Vec3 letters = vel.cross(dvel);
    const double residual = letters.dot(nd.n);
    report.residuals.push_back(residual);
    report.max_abs = std::max(report.max_abs, std::abs(residual));
    report.identity_max = std::max(report.identity_max, std::abs(letters.dot(vel)));
  }
  return report;
}

double residual_halving_factor(const Surface& s, const GeodesicState& start,
                               double length, double step, ResidualForm form) {
  const Trajectory coarse = trace(s, start, length, step);
  const Trajectory fine = trace(s, start, length, step / 2.0);
  const double a = param_form_residual(coarse, s, form).max_abs;
  const double b = param_form_residual(fine, s, form).max_abs;
  if (b == 0.0) throw Error("residual already at rounding floor");
  return a / b;
}

}  // namespace geode
