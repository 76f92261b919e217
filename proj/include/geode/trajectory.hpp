#pragma once

#include "geode/types.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geode {

/// Point on a geodesic: position, unit velocity (position units per arc
/// length), and accumulated arc length.
struct GeodesicState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double s = 0.0;
};

/// Ordered geodesic samples with per-sample diagnostics. `lambda` is the
/// normal-acceleration multiplier, `level_residual` the surface-constraint
/// residual at each sample.
struct Trajectory {
  std::vector<GeodesicState> samples;
  std::vector<double> lambda;
  std::vector<double> level_residual;
  std::optional<std::vector<double>> diagnostics;
  double step = 0.0;
  std::string surface_kind;

  double length() const { return samples.empty() ? 0.0 : samples.back().s; }

  /// Cubic Hermite interpolation between bracketing samples.
  Vec3 position_at(double s) const;
  Vec3 velocity_at(double s) const;

  /// CSV with header `s,x,y,z,vx,vy,vz,lambda,level_residual`, one row per
  /// sample, shortest round-trip decimal formatting.
  void write_csv(std::ostream& out) const;
  static Trajectory read_csv(std::istream& in);
};

}  // namespace geode
