#pragma once

#include "geode/surface.hpp"
#include "geode/tracer.hpp"
#include "geode/types.hpp"

#include <vector>

namespace geode {

/// Two-point geodesic problem: connect `a` to `b` by shooting over initial
/// tangent directions at `a`.
struct ConnectRequest {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double max_length = 10.0;
  double step = 1e-2;
  int seed_count = 16;        // equispaced tangent angles
  double tolerance = 1e-6;    // terminal miss distance for success
};

struct ConnectResult {
  Trajectory trajectory;              // shortest solution found
  double length = 0.0;                // arc length of that solution
  double miss = 0.0;                  // terminal distance to b
  int iterations = 0;                 // objective evaluations spent
  bool multiplicity = false;          // distinct local solutions among seeds
  std::vector<double> solution_lengths;  // all converged solutions, sorted
};

/// Shooting with golden-section refinement of the tangent angle around each
/// locally best seed, then arc-length refinement to the closest approach.
/// Deterministic: ties break toward the smaller angle. Throws
/// ConvergenceError when no seed reaches `b` within tolerance.
ConnectResult connect(const Surface& surface, const ConnectRequest& request);

}  // namespace geode
