#include "geode/develop.hpp"

#include "geode/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace geode {

namespace {

struct RulingEval {
  Vec3 d, dp;  // ruling direction (1, A, B) and its omega-derivative
  Vec3 b, bp;  // directrix (0, C, D) and its omega-derivative
};

RulingEval eval_ruling(const RuledFamily& fam, double omega) {
  const Jet1 a = eval_jet1(fam.a, Var::W, omega);
  const Jet1 b = eval_jet1(fam.b, Var::W, omega);
  const Jet1 c = fam.c ? eval_jet1(*fam.c, Var::W, omega) : Jet1::constant(0.0);
  const Jet1 d = fam.d ? eval_jet1(*fam.d, Var::W, omega) : Jet1::constant(0.0);
  return {Vec3(1.0, a.f, b.f), Vec3(0.0, a.d, b.d), Vec3(0.0, c.f, d.f),
          Vec3(0.0, c.d, d.d)};
}

/// Derivative of the unit ruling direction.
Vec3 uhat_prime(const Vec3& d, const Vec3& dp) {
  const double n2 = d.squaredNorm();
  return dp / std::sqrt(n2) - d * (d.dot(dp) / (n2 * std::sqrt(n2)));
}

/// Surface normal along the ruling at `omega`, oriented to match `reference`
/// when one is supplied.
Vec3 ruling_normal(const RulingEval& e, const Vec3& reference) {
  Vec3 n = e.d.cross(e.dp);
  if (n.norm() < 1e-14 * e.d.norm() * std::max(e.dp.norm(), 1.0)) n = e.d.cross(e.bp);
  const double len = n.norm();
  if (len == 0.0) return reference;  // direction field locally constant
  n /= len;
  if (!reference.isZero() && n.dot(reference) < 0.0) n = -n;
  return n;
}

/// Signed developed turn over one parameter interval, keeping the normal
/// orientation threaded through `running_normal`.
double turn_segment(const RuledFamily& fam, double omega_a, double omega_b,
                    Vec3& running_normal) {
  if (omega_a == omega_b) return 0.0;
  const RulingEval mid = eval_ruling(fam, 0.5 * (omega_a + omega_b));
  const Vec3 nref = ruling_normal(mid, running_normal);
  const double turn = integrate_gl(
      [&](double w) {
        const RulingEval e = eval_ruling(fam, w);
        const Vec3 up = uhat_prime(e.d, e.dp);
        if (up.norm() == 0.0) return 0.0;
        const Vec3 n = ruling_normal(e, nref);
        const Vec3 what = n.cross(e.d.normalized());
        return up.dot(what);
      },
      omega_a, omega_b, 16);
  if (!nref.isZero()) running_normal = nref;
  return turn;
}

}  // namespace

double ruling_turn(const RuledFamily& family, double omega_a, double omega_b) {
  Vec3 running = Vec3::Zero();
  return turn_segment(family, omega_a, omega_b, running);
}

// ---------------------------------------------------------------------------
// Cone development
// ---------------------------------------------------------------------------

DevelopmentMap develop_cone(const RuledFamily& cone, std::span<const Vec3> points,
                            std::span<const double> arc_lengths,
                            std::array<double, 2> omega_range, double theta0) {
  if (!cone.is_cone())
    throw GeometryError("develop_cone: family has a nonzero directrix (not a cone)");
  if (points.empty()) throw GeometryError("develop_cone: no points");
  if (!arc_lengths.empty() && arc_lengths.size() != points.size())
    throw GeometryError("develop_cone: arc-length list does not match the points");

  DevelopmentMap map;
  map.family = "cone";
  std::optional<double> warm;
  Vec3 running_normal = Vec3::Zero();
  double theta = theta0;
  double cumulative = 0.0;

  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec3& p = points[k];
    const double rho = p.norm();
    if (rho < 1e-6)
      throw GeometryError("develop_cone: point inside the apex exclusion zone");
    const double omega = ruling_parameter(cone, p, warm, omega_range);
    const double bval = eval_value1(cone.b, Var::W, omega);
    if (std::abs(p.z() - bval * p.x()) > 1e-8 * std::max(1.0, rho))
      throw GeometryError("develop_cone: point is off the cone");
    if (k > 0) theta += turn_segment(cone, map.omega.back(), omega, running_normal);
    warm = omega;

    map.omega.push_back(omega);
    map.rho.push_back(rho);
    map.theta.push_back(theta);
    map.image.emplace_back(rho * std::cos(theta), rho * std::sin(theta));
    if (!arc_lengths.empty()) {
      map.s.push_back(arc_lengths[k]);
    } else {
      if (k > 0) cumulative += (points[k] - points[k - 1]).norm();
      map.s.push_back(cumulative);
    }
  }
  if (map.image.size() >= 3) map.straightness = straightness_residual(map.image);
  return map;
}

// ---------------------------------------------------------------------------
// General developable development
// ---------------------------------------------------------------------------

DevelopmentMap develop_ruled(const RuledFamily& family, const Trajectory& t,
                             std::array<double, 2> omega_range, double psi0,
                             const Vec2& origin) {
  if (t.samples.empty()) throw GeometryError("develop_ruled: empty trajectory");

  // Assign a ruling to every sample first, then validate the family there.
  std::vector<double> omegas;
  omegas.reserve(t.samples.size());
  std::optional<double> warm;
  for (const auto& g : t.samples) {
    const double w = ruling_parameter(family, g.position, warm, omega_range);
    omegas.push_back(w);
    warm = w;
  }
  const IntegrabilityReport validation = validate_developable(family, omegas);
  if (!validation.integrable)
    throw GeometryError("develop_ruled: family fails the developability condition (max residual " +
                        format_double(validation.max_abs) + ")");

  DevelopmentMap map;
  map.family = "developable";
  map.omega = omegas;

  Vec3 running_normal = Vec3::Zero();
  double psi = psi0;
  Vec2 beta = origin;

  RulingEval e = eval_ruling(family, omegas.front());
  running_normal = ruling_normal(e, running_normal);
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    const Vec3& p = t.samples[k].position;
    const double zfit = e.b.z() + e.d.z() * p.x();
    if (std::abs(p.z() - zfit) > 1e-6 * std::max(1.0, std::abs(p.z())))
      throw GeometryError("develop_ruled: sample is off the ruled surface");

    const double rho = p.x() * e.d.norm();
    map.rho.push_back(rho);
    map.theta.push_back(psi);
    map.s.push_back(t.samples[k].s);
    map.image.emplace_back(beta + rho * Vec2(std::cos(psi), std::sin(psi)));

    if (k + 1 == t.samples.size()) break;
    const RulingEval next = eval_ruling(family, omegas[k + 1]);
    const double dpsi = turn_segment(family, omegas[k], omegas[k + 1], running_normal);

    // Transport the directrix chord in the mid frame (both in 3D and in the
    // plane) for second-order accuracy.
    const RulingEval mid = eval_ruling(family, 0.5 * (omegas[k] + omegas[k + 1]));
    const Vec3 nmid = ruling_normal(mid, running_normal);
    const Vec3 umid = mid.d.normalized();
    const Vec3 wmid = nmid.isZero() ? Vec3::Zero() : nmid.cross(umid);
    const Vec3 chord = next.b - e.b;
    const double along = chord.dot(umid);
    const double across = chord.dot(wmid);
    const double psi_mid = psi + 0.5 * dpsi;
    beta += along * Vec2(std::cos(psi_mid), std::sin(psi_mid)) +
            across * Vec2(-std::sin(psi_mid), std::cos(psi_mid));
    psi += dpsi;
    e = next;
  }
  if (map.image.size() >= 3) map.straightness = straightness_residual(map.image);
  return map;
}

// ---------------------------------------------------------------------------
// Planar diagnostics
// ---------------------------------------------------------------------------

double straightness_residual(std::span<const Vec2> points) {
  if (points.size() < 3)
    throw GeometryError("straightness_residual needs at least 3 points");
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
  for (const Vec2& p : points) {
    const Vec2 q = p - centroid;
    scatter += q * q.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
  const Vec2 normal = eig.eigenvectors().col(0);  // smallest eigenvalue
  double max_dist = 0.0;
  for (const Vec2& p : points)
    max_dist = std::max(max_dist, std::abs((p - centroid).dot(normal)));
  double length = 0.0;
  for (std::size_t k = 1; k < points.size(); ++k)
    length += (points[k] - points[k - 1]).norm();
  if (length == 0.0) return 0.0;
  return max_dist / length;
}

double procrustes_max_distance(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (a.size() != b.size() || a.empty())
    throw GeometryError("procrustes: point sets must be nonempty and equal-sized");
  Vec2 ca = Vec2::Zero(), cb = Vec2::Zero();
  for (const Vec2& p : a) ca += p;
  for (const Vec2& p : b) cb += p;
  ca /= static_cast<double>(a.size());
  cb /= static_cast<double>(b.size());
  Eigen::Matrix2d cross = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k < a.size(); ++k)
    cross += (b[k] - cb) * (a[k] - ca).transpose();
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(cross,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix2d rot = svd.matrixV() * svd.matrixU().transpose();
  if (rot.determinant() < 0.0) {
    Eigen::Matrix2d flip = Eigen::Matrix2d::Identity();
    flip(1, 1) = -1.0;
    rot = svd.matrixV() * flip * svd.matrixU().transpose();
  }
  double max_dist = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Vec2 mapped = rot.transpose() * (a[k] - ca) + cb;
    max_dist = std::max(max_dist, (mapped - b[k]).norm());
  }
  return max_dist;
}

void DevelopmentMap::write_csv(std::ostream& out) const {
  out << "s,xi,eta,omega,rho\n";
  for (std::size_t k = 0; k < image.size(); ++k) {
    out << format_double(s[k]) << ',' << format_double(image[k].x()) << ','
        << format_double(image[k].y()) << ',' << format_double(omega[k]) << ','
        << format_double(rho[k]) << '\n';
  }
}

}  // namespace geode
