#include "geode/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace geode {

namespace {

std::size_t bracket(const std::vector<GeodesicState>& samples, double s) {
  // index k with samples[k].s <= s <= samples[k+1].s, clamped to range
  const auto it = std::upper_bound(
      samples.begin(), samples.end(), s,
      [](double value, const GeodesicState& g) { return value < g.s; });
  std::size_t k = it == samples.begin() ? 0 : (it - samples.begin() - 1);
  if (k + 1 >= samples.size()) k = samples.size() - 2;
  return k;
}

}  // namespace

Vec3 Trajectory::position_at(double s) const {
  if (samples.empty()) throw Error("empty trajectory");
  if (samples.size() == 1) return samples.front().position;
  const std::size_t k = bracket(samples, s);
  const GeodesicState& a = samples[k];
  const GeodesicState& b = samples[k + 1];
  const double h = b.s - a.s;
  const double t = (s - a.s) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * a.position + (t3 - 2 * t2 + t) * h * a.velocity +
         (-2 * t3 + 3 * t2) * b.position + (t3 - t2) * h * b.velocity;
}

Vec3 Trajectory::velocity_at(double s) const {
  if (samples.empty()) throw Error("empty trajectory");
  if (samples.size() == 1) return samples.front().velocity;
  const std::size_t k = bracket(samples, s);
  const GeodesicState& a = samples[k];
  const GeodesicState& b = samples[k + 1];
  const double h = b.s - a.s;
  const double t = (s - a.s) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * (a.position - b.position) / h +
          (3 * t2 - 4 * t + 1) * a.velocity + (3 * t2 - 2 * t) * b.velocity);
}

void Trajectory::write_csv(std::ostream& out) const {
  out << "s,x,y,z,vx,vy,vz,lambda,level_residual\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const GeodesicState& g = samples[i];
    out << format_double(g.s) << ',' << format_double(g.position.x()) << ','
        << format_double(g.position.y()) << ',' << format_double(g.position.z()) << ','
        << format_double(g.velocity.x()) << ',' << format_double(g.velocity.y()) << ','
        << format_double(g.velocity.z()) << ','
        << format_double(i < lambda.size() ? lambda[i] : 0.0) << ','
        << format_double(i < level_residual.size() ? level_residual[i] : 0.0) << '\n';
  }
}

Trajectory Trajectory::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "s,x,y,z,vx,vy,vz,lambda,level_residual")
    throw ParseError("trajectory CSV must start with the standard header", 0);
  Trajectory t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    double fields[9];
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (int i = 0; i < 9; ++i) {
      const auto res = std::from_chars(p, end, fields[i]);
      if (res.ec != std::errc())
        throw ParseError("bad number in trajectory CSV line " + std::to_string(lineno), 0);
      p = res.ptr;
      if (i < 8) {
        if (p >= end || *p != ',')
          throw ParseError("expected ',' in trajectory CSV line " + std::to_string(lineno), 0);
        ++p;
      }
    }
    GeodesicState g;
    g.s = fields[0];
    g.position = Vec3(fields[1], fields[2], fields[3]);
    g.velocity = Vec3(fields[4], fields[5], fields[6]);
    t.samples.push_back(g);
    t.lambda.push_back(fields[7]);
    t.level_residual.push_back(fields[8]);
  }
  if (t.samples.size() >= 2) t.step = t.samples[1].s - t.samples[0].s;
  return t;
}

}  // namespace geode
