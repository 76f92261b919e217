#include "geode/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geode {

namespace {

struct Shot {
  double miss = 0.0;   // closest-approach distance to b
  double s_best = 0.0; // arc length of the closest approach
};

/// Closest approach of the traced polyline to `b`, sharpened by a parabola
/// through the three samples around the discrete minimum.
Shot closest_approach(const Trajectory& t, const Vec3& b) {
  std::size_t kmin = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t.samples.size(); ++k) {
    const double d = (t.samples[k].position - b).norm();
    if (d < dmin) {
      dmin = d;
      kmin = k;
    }
  }
  Shot shot{dmin, t.samples[kmin].s};
  if (kmin == 0 || kmin + 1 >= t.samples.size()) return shot;
  const double s0 = t.samples[kmin - 1].s, s1 = t.samples[kmin].s,
               s2 = t.samples[kmin + 1].s;
  const double d0 = (t.samples[kmin - 1].position - b).squaredNorm();
  const double d1 = (t.samples[kmin].position - b).squaredNorm();
  const double d2 = (t.samples[kmin + 1].position - b).squaredNorm();
  const double denom = (d0 - 2.0 * d1 + d2);
  if (denom > 0.0) {
    const double h = 0.5 * (s2 - s0);
    double s = s1 + h * 0.5 * (d0 - d2) / denom;
    s = std::clamp(s, s0, s2);
    shot.s_best = s;
    shot.miss = (t.position_at(s) - b).norm();
  }
  return shot;
}

struct TangentFrame {
  Vec3 e1, e2;
};

TangentFrame tangent_frame(const Surface& s, const Vec3& a) {
  const Vec3 n = s.normal_at(a).normalized();
  Vec3 seed = Vec3::UnitZ();
  if (std::abs(n.dot(seed)) > 0.9) seed = Vec3::UnitX();
  const Vec3 e1 = (seed - seed.dot(n) * n).normalized();
  const Vec3 e2 = n.cross(e1);
  return {e1, e2};
}

}  // namespace

ConnectResult connect(const Surface& surface, const ConnectRequest& request) {
  if (surface.has_level()) {
    if (std::abs(surface.level_at(request.a)) > 1e-9 ||
        std::abs(surface.level_at(request.b)) > 1e-9)
      throw GeometryError("connect: endpoints must satisfy the surface constraint");
  }
  if (request.seed_count < 3) throw GeometryError("connect: need at least 3 seeds");

  const TangentFrame frame = tangent_frame(surface, request.a);
  int evals = 0;
  auto shoot = [&](double theta) -> Shot {
    const Vec3 dir = std::cos(theta) * frame.e1 + std::sin(theta) * frame.e2;
    const GeodesicState start = make_state(surface, request.a, dir);
    const Trajectory t = trace(surface, start, request.max_length, request.step);
    ++evals;
    return closest_approach(t, request.b);
  };

  const int n = request.seed_count;
  std::vector<Shot> seeds(n);
  for (int j = 0; j < n; ++j) seeds[j] = shoot(2.0 * M_PI * j / n);

  // Refine every seed that is a local minimum of the miss distance.
  struct Solution {
    double theta, length, miss;
  };
  std::vector<Solution> solutions;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int j = 0; j < n; ++j) {
    const double prev = seeds[(j + n - 1) % n].miss;
    const double next = seeds[(j + 1) % n].miss;
    if (!(seeds[j].miss <= prev && seeds[j].miss <= next)) continue;

    double lo = 2.0 * M_PI * (j - 1) / n;
    double hi = 2.0 * M_PI * (j + 1) / n;
    double x1 = hi - golden * (hi - lo);
    double x2 = lo + golden * (hi - lo);
    Shot f1 = shoot(x1), f2 = shoot(x2);
    while (hi - lo > 1e-10) {
      if (f1.miss <= f2.miss) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - golden * (hi - lo);
        f1 = shoot(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + golden * (hi - lo);
        f2 = shoot(x2);
      }
    }
    const double theta = f1.miss <= f2.miss ? x1 : x2;
    const Shot best = f1.miss <= f2.miss ? f1 : f2;
    if (best.miss < request.tolerance)
      solutions.push_back({theta, best.s_best, best.miss});
  }

  if (solutions.empty())
    throw ConvergenceError("connect: no shooting direction reached the endpoint within tolerance");

  // Cluster converged solutions by angle and length; distinct clusters mean
  // geometric multiplicity (including equal-length antipodal families).
  std::sort(solutions.begin(), solutions.end(),
            [](const Solution& a, const Solution& b) {
              return a.length != b.length ? a.length < b.length : a.theta < b.theta;
            });
  std::vector<Solution> distinct;
  for (const auto& sol : solutions) {
    bool is_new = true;
    for (const auto& d : distinct) {
      const double dtheta =
          std::abs(std::remainder(sol.theta - d.theta, 2.0 * M_PI));
      if (dtheta < 1e-4 && std::abs(sol.length - d.length) < 1e-3) {
        is_new = false;
        break;
      }
    }
    if (is_new) distinct.push_back(sol);
  }

  const Solution& winner = distinct.front();
  ConnectResult result;
  result.multiplicity = distinct.size() >= 2;
  for (const auto& d : distinct) result.solution_lengths.push_back(d.length);
  const Vec3 dir = std::cos(winner.theta) * frame.e1 + std::sin(winner.theta) * frame.e2;
  const GeodesicState start = make_state(surface, request.a, dir);
  result.trajectory = trace(surface, start, winner.length, request.step);
  result.length = result.trajectory.length();
  result.miss = (result.trajectory.samples.back().position - request.b).norm();
  result.iterations = evals;
  return result;
}

}  // namespace geode
