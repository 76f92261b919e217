#pragma once

#include "geode/types.hpp"

#include <optional>
#include <string>

namespace geode {

/// Everything a CLI invocation resolved from flags, in one serializable bag.
/// Round-trips exactly through its JSON form.
struct RunConfig {
  std::string subcommand;
  std::string surface_path;
  std::optional<Vec3> start;
  std::optional<Vec3> direction;
  std::optional<Vec3> endpoint_a;
  std::optional<Vec3> endpoint_b;
  std::optional<double> length;
  std::optional<double> step;
  std::optional<double> clairaut_a;
  std::optional<double> v0, v1;
  std::optional<double> u0, u1, w0;
  std::optional<double> max_length;
  std::optional<double> tolerance;
  std::optional<int> nodes;
  std::optional<int> samples;
  std::optional<std::string> t_of_u;
  std::optional<std::string> trajectory_path;
  std::string out_path;
  std::string format = "csv";

  std::string to_json_text() const;
  static RunConfig from_json_text(std::string_view text);
  bool operator==(const RunConfig& other) const;
};

}  // namespace geode
