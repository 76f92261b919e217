#include "geode/reduction.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <cmath>

namespace geode {

namespace {

void finish_stats(ConservationReport& r) {
  const std::size_t n = r.values.size();
  r.samples_used = n;
  if (n == 0) return;
  double sum = 0.0;
  for (double v : r.values) sum += v;
  r.mean = sum / n;
  for (double v : r.values) r.max_abs_dev = std::max(r.max_abs_dev, std::abs(v - r.mean));
  // least-squares slope of value against s
  double s_mean = 0.0;
  for (double s : r.s) s_mean += s;
  s_mean /= n;
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (r.s[i] - s_mean) * (r.values[i] - r.mean);
    den += (r.s[i] - s_mean) * (r.s[i] - s_mean);
  }
  r.drift_per_unit_s = den > 0.0 ? num / den : 0.0;
}

PlaneFit fit_plane_through_origin(const std::vector<GeodesicState>& samples) {
  Mat3 scatter = Mat3::Zero();
  for (const auto& g : samples) scatter += g.position * g.position.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  Vec3 n = eig.eigenvectors().col(0);  // smallest eigenvalue
  int imax = 0;
  n.cwiseAbs().maxCoeff(&imax);
  if (n[imax] < 0.0) n = -n;
  PlaneFit fit{n, 0.0};
  for (const auto& g : samples)
    fit.max_residual = std::max(fit.max_residual, std::abs(g.position.dot(n)));
  return fit;
}

}  // namespace

ConservationReport plane_constant(const Trajectory& t) {
  if (t.samples.empty()) throw GeometryError("plane_constant: empty trajectory");
  ConservationReport r;
  r.quantity = "plane-constant";
  for (const auto& g : t.samples) {
    const double den = g.position.y() * g.velocity.x() - g.position.x() * g.velocity.y();
    if (std::abs(den) < 1e-10) {
      ++r.samples_skipped;
      continue;
    }
    const double num = g.position.z() * g.velocity.x() - g.position.x() * g.velocity.z();
    r.s.push_back(g.s);
    r.values.push_back(num / den);
  }
  if (r.values.empty())
    throw GeometryError("plane_constant: all samples denominator-degenerate");
  if (r.values.size() < 0.9 * t.samples.size())
    throw GeometryError("plane_constant: fewer than 90% of samples usable");
  finish_stats(r);
  r.plane = fit_plane_through_origin(t.samples);
  return r;
}

ConservationReport cylinder_ratio(const Trajectory& t) {
  if (t.samples.empty()) throw GeometryError("cylinder_ratio: empty trajectory");
  ConservationReport r;
  r.quantity = "cylinder-ratio";
  for (const auto& g : t.samples) {
    r.s.push_back(g.s);
    r.values.push_back(g.velocity.z());
  }
  finish_stats(r);
  const double z0 = t.samples.front().position.z();
  const double rate0 = t.samples.front().velocity.z();
  double max_err = 0.0;
  for (const auto& g : t.samples)
    max_err = std::max(max_err, std::abs(g.position.z() - z0 - rate0 * g.s));
  r.proportionality_max_err = max_err;
  return r;
}

ConservationReport clairaut_constant(const Trajectory& t) {
  if (t.samples.empty()) throw GeometryError("clairaut_constant: empty trajectory");
  ConservationReport r;
  r.quantity = "clairaut";
  for (const auto& g : t.samples) {
    r.s.push_back(g.s);
    r.values.push_back(g.position.x() * g.velocity.y() - g.position.y() * g.velocity.x());
  }
  finish_stats(r);
  return r;
}

// ---------------------------------------------------------------------------
// Revolution quadrature
// ---------------------------------------------------------------------------

namespace {

double revolution_integrand(const Surface& s, double A, double v) {
  const double r = s.revolution_coefficient_at(v).f;
  if (r == 0.0) throw DomainError("revolution integrand singular: r(v) = 0");
  return A * std::sqrt(r * r + v * v) / (std::abs(r) * v);
}

}  // namespace

QuadratureResult revolution_quadrature(const Surface& revolution, double A, double v0,
                                       double v1, int nodes, double axis_epsilon) {
  if (revolution.family() != Surface::Family::Revolution)
    throw GeometryError("revolution_quadrature: surface is not a surface of revolution");
  if (A < 0.0) throw GeometryError("revolution_quadrature: A must be nonnegative");
  if (!(v0 < v1)) throw GeometryError("revolution_quadrature: invalid interval");
  if (v0 < axis_epsilon)
    throw GeometryError("revolution_quadrature: interval enters the axis neighborhood");
  if (v0 < A - 1e-12)
    throw GeometryError("revolution_quadrature: interval crosses below v = A");

  QuadratureResult out;
  out.lo = v0;
  out.hi = v1;
  if (A == 0.0) {
    out.nodes = 0;
    return out;  // meridian: the integrand is proportional to A
  }

  const double vA = std::max(v0, A);

  // Interior scan: a vanishing or sign-changing coefficient r(v) strictly
  // inside the interval makes the sweep diverge.
  {
    double prev_r = 0.0;
    for (int i = 1; i < 128; ++i) {
      const double v = vA + (v1 - vA) * i / 128.0;
      double r;
      try {
        r = revolution.revolution_coefficient_at(v).f;
      } catch (const DomainError& e) {
        throw GeometryError(
            std::string("revolution_quadrature: singular interior point (") + e.what() +
            ")");
      }
      if (r == 0.0 || (i > 1 && std::signbit(r) != std::signbit(prev_r)))
        throw GeometryError("revolution_quadrature: singular interior point (r(v) "
                            "vanishes inside the interval)");
      prev_r = r;
    }
  }

  // Detect an equator-type barrier at the upper endpoint, where r -> 0 and
  // the swept angle has an integrable inverse-square-root singularity.
  bool upper_singular = false;
  try {
    const double r1 = revolution.revolution_coefficient_at(v1).f;
    const double rm = revolution.revolution_coefficient_at(0.5 * (v0 + v1)).f;
    upper_singular = std::abs(r1) < 1e-8 * std::max(1.0, std::abs(rm));
  } catch (const DomainError&) {
    upper_singular = true;
  }

  auto in_xi = [&](double lo_v, double hi_v) {
    // v = sqrt(A^2 + xi^2) removes the 1/sqrt(v^2 - A^2) factor at v = A.
    const double xi_lo = std::sqrt(std::max(0.0, lo_v * lo_v - A * A));
    const double xi_hi = std::sqrt(hi_v * hi_v - A * A);
    return integrate_gl_with_estimate(
        [&](double xi) {
          const double v = std::sqrt(A * A + xi * xi);
          const double r = revolution.revolution_coefficient_at(v).f;
          if (r == 0.0) throw DomainError("revolution integrand singular: r(v) = 0");
          return A * std::sqrt(r * r + v * v) / (std::abs(r) * v * v);
        },
        xi_lo, xi_hi, nodes);
  };

  double value = 0.0, est = 0.0;
  int used = 0;
  try {
    if (!upper_singular) {
      const QuadratureResult q = in_xi(vA, v1);
      value = q.value;
      est = q.est_error;
      used = nodes;
    } else {
      const double vm = 0.5 * (vA + v1);
      const QuadratureResult lower = in_xi(vA, vm);
      // v = v1 - eta^2 regularizes r ~ sqrt(v1 - v) at the barrier.
      const QuadratureResult upper = integrate_gl_with_estimate(
          [&](double eta) {
            const double v = v1 - eta * eta;
            return revolution_integrand(revolution, A, v) * 2.0 * eta /
                   std::sqrt(v * v - A * A);
          },
          0.0, std::sqrt(v1 - vm), nodes);
      value = lower.value + upper.value;
      est = lower.est_error + upper.est_error;
      used = 2 * nodes;
    }
  } catch (const DomainError& e) {
    throw GeometryError(std::string("revolution_quadrature: singular interior point (") +
                        e.what() + ")");
  }
  out.value = std::abs(value);
  out.est_error = est;
  out.nodes = used;
  return out;
}

// ---------------------------------------------------------------------------
// Reduced slope equation
// ---------------------------------------------------------------------------

ReducedState reduced_state_from_slopes(double p, double q, double pi) {
  if (p == 0.0) throw GeometryError("reduced state: u = q/p undefined for p = 0");
  const double den = p + pi * q;
  if (std::abs(den) < 1e-12 * std::max({1.0, std::abs(p), std::abs(q)}))
    throw GeometryError("reduced state: degenerate denominator p + pi q");
  ReducedState st;
  st.u = q / p;
  st.t = std::sqrt(p * p + q * q);
  st.v = (q - pi * p) / den;
  st.w = st.v / std::sqrt(1.0 + st.t * st.t);
  return st;
}

double slope_from_reduced(double p, double q, double v) {
  const double den = p + v * q;
  if (std::abs(den) < 1e-12 * std::max({1.0, std::abs(p), std::abs(q)}))
    throw GeometryError("slope_from_reduced: degenerate denominator p + v q");
  return (q - v * p) / den;
}

WuQuadrature reduced_wu_quadrature_full(const Expression& t_of_u, double u0, double u1,
                                        double w0, int nodes) {
  const std::uint8_t used = t_of_u.used_vars();
  if (std::popcount(used) > 1)
    throw DomainError("t(u) must be a formula in a single variable");
  std::optional<Var> var;
  for (int i = 0; i < kVarCount; ++i)
    if ((used >> i) & 1) var = static_cast<Var>(i);

  auto integrand = [&](double u) {
    const double t = var ? eval_value1(t_of_u, *var, u) : eval_value(t_of_u, Vec3::Zero());
    return 1.0 / ((1.0 + u * u) * std::sqrt(1.0 + t * t));
  };

  WuQuadrature out;
  out.integral = integrate_gl_with_estimate(integrand, u0, u1, std::max(2, nodes));
  out.delta_arctan = out.integral.value;
  const double accumulated = std::atan(w0) + out.delta_arctan;
  if (!(accumulated > -M_PI_2 && accumulated < M_PI_2))
    throw DomainError("reduced slope equation: arctan branch crossing at " +
                      format_double(accumulated));
  out.w1 = std::tan(accumulated);
  return out;
}

double reduced_wu_quadrature(const Expression& t_of_u, double u0, double u1, double w0,
                             int nodes) {
  return reduced_wu_quadrature_full(t_of_u, u0, u1, w0, nodes).w1;
}

}  // namespace geode
