#include "geode/surface.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace geode {

namespace {

constexpr double kDegenerateNormal = 1e-12;

void require_vars(const Expression& e, std::uint8_t allowed, const char* what) {
  const std::uint8_t used = e.used_vars();
  if (used & ~allowed)
    throw GeometryError(std::string(what) + " formula '" + e.str() +
                        "' uses a variable outside its allowed set");
}

constexpr std::uint8_t mask_xyz = 0b00111;
constexpr std::uint8_t mask_xy = 0b00011;
constexpr std::uint8_t mask_v = 0b01000;
constexpr std::uint8_t mask_w = 0b10000;

}  // namespace

Surface::Surface(Data data, std::string kind)
    : data_(std::move(data)), kind_name_(std::move(kind)) {}

Surface Surface::normal_field(Expression p, Expression q, Expression r) {
  require_vars(p, mask_xyz, "normal-field p");
  require_vars(q, mask_xyz, "normal-field q");
  require_vars(r, mask_xyz, "normal-field r");
  return Surface(NormalFieldSurface{std::move(p), std::move(q), std::move(r)},
                 "normal-field");
}

Surface Surface::implicit(Expression f) {
  require_vars(f, mask_xyz, "implicit");
  return Surface(ImplicitSurface{std::move(f)}, "implicit");
}

Surface Surface::graph(Expression zeta) {
  require_vars(zeta, mask_xy, "graph");
  return Surface(GraphSurface{std::move(zeta)}, "graph");
}

Surface Surface::revolution(Expression z_of_v) {
  require_vars(z_of_v, mask_v, "revolution profile");
  return Surface(RevolutionSurface{std::move(z_of_v), std::nullopt}, "revolution");
}

Surface Surface::revolution_coefficient(Expression r_of_v) {
  require_vars(r_of_v, mask_v, "revolution coefficient");
  return Surface(RevolutionSurface{std::nullopt, std::move(r_of_v)}, "revolution");
}

Surface Surface::ruled(RuledFamily family) {
  require_vars(family.a, mask_w, "ruled A");
  require_vars(family.b, mask_w, "ruled B");
  if (family.c) require_vars(*family.c, mask_w, "ruled C");
  if (family.d) require_vars(*family.d, mask_w, "ruled D");
  if (family.c.has_value() != family.d.has_value())
    throw GeometryError("ruled family needs either both C and D or neither");
  const bool cone = family.is_cone();
  return Surface(std::move(family), cone ? "cone" : "developable");
}

Surface::Family Surface::family() const {
  return static_cast<Family>(data_.index());
}

std::array<double, 2> Surface::omega_range() const {
  if (domain_.omega) return *domain_.omega;
  return {-1.25, 1.25};
}

const NormalFieldSurface& Surface::normal_field_surface() const {
  if (auto* s = std::get_if<NormalFieldSurface>(&data_)) return *s;
  throw GeometryError("surface is not a normal field");
}
const ImplicitSurface& Surface::implicit_surface() const {
  if (auto* s = std::get_if<ImplicitSurface>(&data_)) return *s;
  throw GeometryError("surface is not implicit");
}
const GraphSurface& Surface::graph_surface() const {
  if (auto* s = std::get_if<GraphSurface>(&data_)) return *s;
  throw GeometryError("surface is not a graph");
}
const RevolutionSurface& Surface::revolution_surface() const {
  if (auto* s = std::get_if<RevolutionSurface>(&data_)) return *s;
  throw GeometryError("surface is not a surface of revolution");
}
const RuledFamily& Surface::ruled_family() const {
  if (auto* s = std::get_if<RuledFamily>(&data_)) return *s;
  throw GeometryError("surface is not a ruled family");
}

Jet1 Surface::revolution_coefficient_at(double v) const {
  const auto& rev = revolution_surface();
  if (rev.r_of_v) return eval_jet1(*rev.r_of_v, Var::V, v);
  const Jet1 z = eval_jet1(*rev.z_of_v, Var::V, v);
  if (z.d == 0.0)
    throw DomainError("revolution coefficient undefined where the profile slope vanishes");
  // r = -v / z'(v); second-derivative slot not populated on this path.
  const double r = -v / z.d;
  const double dr = (v * z.dd - z.d) / (z.d * z.d);
  return Jet1{r, dr, 0.0};
}

// ---------------------------------------------------------------------------
// Normal field and Jacobian
// ---------------------------------------------------------------------------

Surface::NormalData Surface::normal_data(const Vec3& point,
                                         std::optional<double> warm_omega) const {
  NormalData out;
  out.jacobian = Mat3::Zero();

  switch (family()) {
    case Family::NormalField: {
      const auto& s = std::get<NormalFieldSurface>(data_);
      const Jet2 p = eval_jet2(s.p, point);
      const Jet2 q = eval_jet2(s.q, point);
      const Jet2 r = eval_jet2(s.r, point);
      out.n = Vec3(p.f, q.f, r.f);
      out.jacobian.row(0) = p.g;
      out.jacobian.row(1) = q.g;
      out.jacobian.row(2) = r.g;
      break;
    }
    case Family::Implicit: {
      const Jet2 f = eval_jet2(std::get<ImplicitSurface>(data_).f, point);
      out.n = f.g;
      out.jacobian = f.hess_matrix();
      break;
    }
    case Family::Graph: {
      const Jet2 zeta = eval_jet2(std::get<GraphSurface>(data_).zeta,
                                  Vec3(point.x(), point.y(), 0.0));
      out.n = Vec3(zeta.g[0], zeta.g[1], -1.0);
      out.jacobian(0, 0) = zeta.hess(0, 0);
      out.jacobian(0, 1) = zeta.hess(0, 1);
      out.jacobian(1, 0) = zeta.hess(0, 1);
      out.jacobian(1, 1) = zeta.hess(1, 1);
      break;
    }
    case Family::Revolution: {
      const double v = std::hypot(point.x(), point.y());
      const Jet1 r = revolution_coefficient_at(v);
      out.n = Vec3(point.x(), point.y(), r.f);
      out.jacobian(0, 0) = 1.0;
      out.jacobian(1, 1) = 1.0;
      if (v > 0.0) {
        out.jacobian(2, 0) = r.d * point.x() / v;
        out.jacobian(2, 1) = r.d * point.y() / v;
      }
      break;
    }
    case Family::Ruled: {
      const auto& fam = std::get<RuledFamily>(data_);
      const double omega = ruling_parameter(fam, point, warm_omega, omega_range());
      out.omega = omega;
      const Jet1 a = eval_jet1(fam.a, Var::W, omega);
      const Jet1 b = eval_jet1(fam.b, Var::W, omega);
      const Jet1 c = fam.c ? eval_jet1(*fam.c, Var::W, omega) : Jet1::constant(0.0);
      const Jet1 d = fam.d ? eval_jet1(*fam.d, Var::W, omega) : Jet1::constant(0.0);
      const double x = point.x();
      const double den = a.d * x + c.d;
      if (std::abs(den) < kDegenerateNormal)
        throw GeometryError("ruling envelope: A'x + C' vanishes at the queried point");
      const double q = (b.d * x + d.d) / den;
      const double p = b.f - a.f * q;
      out.n = Vec3(p, q, -1.0);

      // Total derivatives through the implicit ruling parameter
      // (A(w)x + C(w) = y gives w_x = -A/den, w_y = 1/den).
      const double wx = -a.f / den;
      const double wy = 1.0 / den;
      const double dq_dx_expl = (b.d * den - a.d * (b.d * x + d.d)) / (den * den);
      const double dq_dw =
          ((b.dd * x + d.dd) * den - (b.d * x + d.d) * (a.dd * x + c.dd)) / (den * den);
      const double dq_dx = dq_dx_expl + dq_dw * wx;
      const double dq_dy = dq_dw * wy;
      const double dp_dw = b.d - a.d * q - a.f * dq_dw;
      const double dp_dx = -a.f * dq_dx_expl + dp_dw * wx;
      const double dp_dy = dp_dw * wy;
      out.jacobian(0, 0) = dp_dx;
      out.jacobian(0, 1) = dp_dy;
      out.jacobian(1, 0) = dq_dx;
      out.jacobian(1, 1) = dq_dy;
      break;
    }
  }

  if (out.n.norm() < kDegenerateNormal)
    throw GeometryError("degenerate normal (|n| < 1e-12) at the queried point");
  return out;
}

Vec3 Surface::normal_at(const Vec3& point) const { return normal_data(point).n; }

Mat3 Surface::normal_jacobian_at(const Vec3& point) const {
  return normal_data(point).jacobian;
}

double Surface::integrability_residual(const Vec3& point) const {
  const NormalData d = normal_data(point);
  const Mat3& j = d.jacobian;
  return d.n[0] * (j(1, 2) - j(2, 1)) + d.n[1] * (j(2, 0) - j(0, 2)) +
         d.n[2] * (j(0, 1) - j(1, 0));
}

// ---------------------------------------------------------------------------
// Level function and projection
// ---------------------------------------------------------------------------

bool Surface::has_level() const {
  switch (family()) {
    case Family::Implicit:
    case Family::Graph:
      return true;
    case Family::Revolution:
      return std::get<RevolutionSurface>(data_).z_of_v.has_value();
    default:
      return false;
  }
}

double Surface::level_at(const Vec3& point) const {
  switch (family()) {
    case Family::Implicit:
      return eval_value(std::get<ImplicitSurface>(data_).f, point);
    case Family::Graph:
      return point.z() - eval_value(std::get<GraphSurface>(data_).zeta,
                                    Vec3(point.x(), point.y(), 0.0));
    case Family::Revolution: {
      const auto& rev = std::get<RevolutionSurface>(data_);
      if (!rev.z_of_v)
        throw GeometryError("revolution surface given by coefficient only has no level function");
      const double v = std::hypot(point.x(), point.y());
      return point.z() - eval_value1(*rev.z_of_v, Var::V, v);
    }
    default:
      throw GeometryError("surface family has no level function");
  }
}

namespace {

Vec3 level_gradient(const Surface& s, const Vec3& point) {
  switch (s.family()) {
    case Surface::Family::Implicit:
      return eval_jet2(s.implicit_surface().f, point).g;
    case Surface::Family::Graph: {
      const Jet2 z = eval_jet2(s.graph_surface().zeta, Vec3(point.x(), point.y(), 0.0));
      return Vec3(-z.g[0], -z.g[1], 1.0);
    }
    case Surface::Family::Revolution: {
      const double v = std::hypot(point.x(), point.y());
      const Jet1 z = eval_jet1(*s.revolution_surface().z_of_v, Var::V, v);
      if (v == 0.0) return Vec3(0.0, 0.0, 1.0);
      return Vec3(-z.d * point.x() / v, -z.d * point.y() / v, 1.0);
    }
    default:
      throw GeometryError("surface family has no level function");
  }
}

}  // namespace

Vec3 Surface::project(const Vec3& point, int* iterations) const {
  if (!has_level())
    throw GeometryError("projection requires an implicit, graph, or revolution surface");

  if (family() == Family::Graph) {
    // Vertical projection lands exactly in one step.
    const double z = eval_value(std::get<GraphSurface>(data_).zeta,
                                Vec3(point.x(), point.y(), 0.0));
    if (iterations) *iterations = 1;
    return Vec3(point.x(), point.y(), z);
  }

  Vec3 p = point;
  double residual = level_at(p);
  for (int it = 1; it <= 20; ++it) {
    if (std::abs(residual) < 1e-13) {
      if (iterations) *iterations = it - 1;
      return p;
    }
    const Vec3 grad = level_gradient(*this, p);
    const Vec3 dir = normal_at(p).normalized();
    const double slope = grad.dot(dir);
    if (std::abs(slope) < 1e-14)
      throw ConvergenceError("projection stalled: level gradient orthogonal to the normal");
    const Vec3 next = p - (residual / slope) * dir;
    const double next_residual = level_at(next);
    if (std::abs(next_residual) >= std::abs(residual) && std::abs(residual) < 1e-12) {
      if (iterations) *iterations = it;
      return p;  // at the rounding floor already
    }
    p = next;
    residual = next_residual;
  }
  if (std::abs(residual) < 1e-12) {
    if (iterations) *iterations = 20;
    return p;
  }
  throw ConvergenceError("projection did not converge in 20 iterations");
}

double Surface::constraint_residual(const Vec3& point) const {
  if (has_level()) return level_at(point);
  if (family() == Family::Ruled) {
    const auto& fam = std::get<RuledFamily>(data_);
    const double omega = ruling_parameter(fam, point, std::nullopt, omega_range());
    const double b = eval_value1(fam.b, Var::W, omega);
    const double d = fam.d ? eval_value1(*fam.d, Var::W, omega) : 0.0;
    return point.z() - b * point.x() - d;
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Ruled-family operations
// ---------------------------------------------------------------------------

SlopePair slopes_from_family(const RuledFamily& family, double omega) {
  const Jet1 a = eval_jet1(family.a, Var::W, omega);
  const Jet1 b = eval_jet1(family.b, Var::W, omega);
  if (std::abs(a.d) < 1e-12)
    throw GeometryError("ruling degeneracy: |A'(w)| < 1e-12");
  const double q = b.d / a.d;
  return SlopePair{b.f - a.f * q, q};
}

IntegrabilityReport validate_developable(const RuledFamily& family,
                                         std::span<const double> omega_samples,
                                         double tolerance) {
  if (omega_samples.empty())
    throw GeometryError("validate_developable needs a nonempty sample list");
  IntegrabilityReport report;
  report.tolerance = tolerance;
  report.integrable = true;
  for (const double w : omega_samples) {
    const Jet1 a = eval_jet1(family.a, Var::W, w);
    const Jet1 b = eval_jet1(family.b, Var::W, w);
    const Jet1 c = family.c ? eval_jet1(*family.c, Var::W, w) : Jet1::constant(0.0);
    const Jet1 d = family.d ? eval_jet1(*family.d, Var::W, w) : Jet1::constant(0.0);
    const double residual = a.d * d.d - b.d * c.d;
    report.omegas.push_back(w);
    report.residuals.push_back(residual);
    report.max_abs = std::max(report.max_abs, std::abs(residual));
    if (std::abs(residual) >= tolerance * std::max(1.0, std::abs(a.d * d.d)))
      report.integrable = false;
  }
  return report;
}

double ruling_parameter(const RuledFamily& family, const Vec3& point,
                        std::optional<double> warm,
                        const std::array<double, 2>& range) {
  const double x = point.x(), y = point.y();
  auto g = [&](double w) {
    return eval_value1(family.a, Var::W, w) * x +
           (family.c ? eval_value1(*family.c, Var::W, w) : 0.0) - y;
  };
  auto gprime = [&](double w) {
    return eval_jet1(family.a, Var::W, w).d * x +
           (family.c ? eval_jet1(*family.c, Var::W, w).d : 0.0);
  };
  const double scale = std::max({1.0, std::abs(y), std::abs(x)});

  auto newton = [&](double w0) -> std::optional<double> {
    double w = w0;
    for (int it = 0; it < 40; ++it) {
      const double gw = g(w);
      if (std::abs(gw) < 1e-13 * scale) return w;
      const double dg = gprime(w);
      if (std::abs(dg) < 1e-14) return std::nullopt;
      const double step = gw / dg;
      w -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(w))) {
        if (std::abs(g(w)) < 1e-10 * scale) return w;
        return std::nullopt;
      }
    }
    return std::abs(g(w)) < 1e-10 * scale ? std::optional<double>(w) : std::nullopt;
  };

  if (warm) {
    if (auto w = newton(*warm)) return *w;
  }

  // Scan the search range, then refine the most promising seeds.
  constexpr int kScan = 64;
  std::vector<std::pair<double, double>> candidates;  // (|g|, w)
  for (int i = 0; i <= kScan; ++i) {
    const double w = range[0] + (range[1] - range[0]) * i / kScan;
    try {
      candidates.emplace_back(std::abs(g(w)), w);
    } catch (const DomainError&) {
      // outside the formula's domain; skip this seed
    }
  }
  if (candidates.empty())
    throw ConvergenceError("ruling solve: the search range is outside the family's domain");
  std::sort(candidates.begin(), candidates.end());
  const std::size_t tries = std::min<std::size_t>(candidates.size(), 8);
  for (std::size_t i = 0; i < tries; ++i) {
    if (auto w = newton(candidates[i].second)) return *w;
  }
  throw ConvergenceError("ruling solve did not converge for the queried point");
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

Expression parse_field(const json& j, const char* key) {
  if (!j.contains(key))
    throw ParseError(std::string("surface definition is missing field '") + key + "'", 0);
  if (!j.at(key).is_string())
    throw ParseError(std::string("surface field '") + key + "' must be a string", 0);
  try {
    return Expression::parse(j.at(key).get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(std::string("in field '") + key + "': " + e.what(), e.offset);
  }
}

std::optional<std::array<double, 2>> range_field(const json& domain, const char* key) {
  if (!domain.contains(key)) return std::nullopt;
  const auto& r = domain.at(key);
  if (!r.is_array() || r.size() != 2)
    throw ParseError(std::string("domain hint '") + key + "' must be [lo, hi]", 0);
  return std::array<double, 2>{r[0].get<double>(), r[1].get<double>()};
}

}  // namespace

Surface Surface::from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw ParseError("surface definition must be an object with a 'kind' string", 0);
  const std::string kind = j.at("kind").get<std::string>();

  std::optional<Surface> s;
  if (kind == "normal-field") {
    s = normal_field(parse_field(j, "p"), parse_field(j, "q"), parse_field(j, "r"));
  } else if (kind == "implicit") {
    s = implicit(parse_field(j, "F"));
  } else if (kind == "graph") {
    s = graph(parse_field(j, "zeta"));
  } else if (kind == "revolution") {
    if (j.contains("z_of_v"))
      s = revolution(parse_field(j, "z_of_v"));
    else if (j.contains("r_of_v"))
      s = revolution_coefficient(parse_field(j, "r_of_v"));
    else
      throw ParseError("revolution surface needs 'z_of_v' or 'r_of_v'", 0);
  } else if (kind == "cone") {
    RuledFamily fam{parse_field(j, "A"), parse_field(j, "B"), std::nullopt, std::nullopt};
    s = ruled(std::move(fam));
  } else if (kind == "developable") {
    RuledFamily fam{parse_field(j, "A"), parse_field(j, "B"), parse_field(j, "C"),
                    parse_field(j, "D")};
    s = ruled(std::move(fam));
  } else {
    throw ParseError("unknown surface kind '" + kind + "'", 0);
  }

  if (j.contains("domain")) {
    const auto& domain = j.at("domain");
    if (!domain.is_object()) throw ParseError("'domain' must be an object", 0);
    DomainHints hints;
    hints.x = range_field(domain, "x");
    hints.y = range_field(domain, "y");
    hints.z = range_field(domain, "z");
    hints.v = range_field(domain, "v");
    hints.omega = range_field(domain, "omega");
    s->set_domain(hints);
  }
  return std::move(*s);
}

std::string Surface::to_json_text() const {
  json j;
  j["kind"] = kind_name_;
  switch (family()) {
    case Family::NormalField: {
      const auto& s = std::get<NormalFieldSurface>(data_);
      j["p"] = s.p.str();
      j["q"] = s.q.str();
      j["r"] = s.r.str();
      break;
    }
    case Family::Implicit:
      j["F"] = std::get<ImplicitSurface>(data_).f.str();
      break;
    case Family::Graph:
      j["zeta"] = std::get<GraphSurface>(data_).zeta.str();
      break;
    case Family::Revolution: {
      const auto& s = std::get<RevolutionSurface>(data_);
      if (s.z_of_v) j["z_of_v"] = s.z_of_v->str();
      if (s.r_of_v) j["r_of_v"] = s.r_of_v->str();
      break;
    }
    case Family::Ruled: {
      const auto& s = std::get<RuledFamily>(data_);
      j["A"] = s.a.str();
      j["B"] = s.b.str();
      if (s.c) j["C"] = s.c->str();
      if (s.d) j["D"] = s.d->str();
      break;
    }
  }
  json domain = json::object();
  auto put = [&](const char* key, const std::optional<std::array<double, 2>>& r) {
    if (r) domain[key] = {(*r)[0], (*r)[1]};
  };
  put("x", domain_.x);
  put("y", domain_.y);
  put("z", domain_.z);
  put("v", domain_.v);
  put("omega", domain_.omega);
  if (!domain.empty()) j["domain"] = domain;
  return j.dump(2);
}

}  // namespace geode
