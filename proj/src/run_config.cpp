#include "geode/run_config.hpp"

#include <nlohmann/json.hpp>

namespace geode {

namespace {

using nlohmann::json;

void put_vec(json& j, const char* key, const std::optional<Vec3>& v) {
  if (v) j[key] = {v->x(), v->y(), v->z()};
}
void put(json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}
void put(json& j, const char* key, const std::optional<int>& v) {
  if (v) j[key] = *v;
}
void put(json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

std::optional<Vec3> get_vec(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  const auto& a = j.at(key);
  return Vec3(a.at(0).get<double>(), a.at(1).get<double>(), a.at(2).get<double>());
}
template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string RunConfig::to_json_text() const {
  json j;
  j["subcommand"] = subcommand;
  j["surface"] = surface_path;
  put_vec(j, "start", start);
  put_vec(j, "dir", direction);
  put_vec(j, "a", endpoint_a);
  put_vec(j, "b", endpoint_b);
  put(j, "length", length);
  put(j, "step", step);
  put(j, "A", clairaut_a);
  put(j, "v0", v0);
  put(j, "v1", v1);
  put(j, "u0", u0);
  put(j, "u1", u1);
  put(j, "w0", w0);
  put(j, "max_length", max_length);
  put(j, "tolerance", tolerance);
  put(j, "nodes", nodes);
  put(j, "samples", samples);
  put(j, "t_of_u", t_of_u);
  put(j, "trajectory", trajectory_path);
  j["out"] = out_path;
  j["format"] = format;
  return j.dump(2);
}

RunConfig RunConfig::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config JSON: ") + e.what(), e.byte);
  }
  RunConfig c;
  c.subcommand = j.value("subcommand", "");
  c.surface_path = j.value("surface", "");
  c.start = get_vec(j, "start");
  c.direction = get_vec(j, "dir");
  c.endpoint_a = get_vec(j, "a");
  c.endpoint_b = get_vec(j, "b");
  c.length = get_opt<double>(j, "length");
  c.step = get_opt<double>(j, "step");
  c.clairaut_a = get_opt<double>(j, "A");
  c.v0 = get_opt<double>(j, "v0");
  c.v1 = get_opt<double>(j, "v1");
  c.u0 = get_opt<double>(j, "u0");
  c.u1 = get_opt<double>(j, "u1");
  c.w0 = get_opt<double>(j, "w0");
  c.max_length = get_opt<double>(j, "max_length");
  c.tolerance = get_opt<double>(j, "tolerance");
  c.nodes = get_opt<int>(j, "nodes");
  c.samples = get_opt<int>(j, "samples");
  c.t_of_u = get_opt<std::string>(j, "t_of_u");
  c.trajectory_path = get_opt<std::string>(j, "trajectory");
  c.out_path = j.value("out", "");
  c.format = j.value("format", "csv");
  return c;
}

bool RunConfig::operator==(const RunConfig& other) const {
  auto veq = [](const std::optional<Vec3>& a, const std::optional<Vec3>& b) {
    if (a.has_value() != b.has_value()) return false;
    return !a || *a == *b;
  };
  return subcommand == other.subcommand && surface_path == other.surface_path &&
         veq(start, other.start) && veq(direction, other.direction) &&
         veq(endpoint_a, other.endpoint_a) && veq(endpoint_b, other.endpoint_b) &&
         length == other.length && step == other.step &&
         clairaut_a == other.clairaut_a && v0 == other.v0 && v1 == other.v1 &&
         u0 == other.u0 && u1 == other.u1 && w0 == other.w0 &&
         max_length == other.max_length && tolerance == other.tolerance &&
         nodes == other.nodes && samples == other.samples && t_of_u == other.t_of_u &&
         trajectory_path == other.trajectory_path && out_path == other.out_path &&
         format == other.format;
}

}  // namespace geode
