// Command-line front end: surface definitions in, trajectories, reports and
// developments out. Exit codes: 0 success, 2 mathematical-check failure,
// 64 usage or parse error.

#include "geode/bvp.hpp"
#include "geode/develop.hpp"
#include "geode/expr.hpp"
#include "geode/oracle.hpp"
#include "geode/reduction.hpp"
#include "geode/report_json.hpp"
#include "geode/run_config.hpp"
#include "geode/surface.hpp"
#include "geode/tracer.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitCheckFailure = 2;
constexpr int kExitUsage = 64;

geode::Surface load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw geode::ParseError("cannot open surface file '" + path + "'", 0);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return geode::Surface::from_json_text(buffer.str());
}

geode::Vec3 parse_triple(const std::string& text) {
  geode::Vec3 v;
  char comma1 = 0, comma2 = 0;
  std::istringstream in(text);
  in >> v.x() >> comma1 >> v.y() >> comma2 >> v.z();
  if (!in || comma1 != ',' || comma2 != ',')
    throw geode::ParseError("expected x,y,z but got '" + text + "'", 0);
  return v;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw geode::Error("cannot open output file '" + path + "'");
  out << contents;
}

/// Conserved-quantity report matched to the surface family: plane constant
/// on spheres centered at the origin, height-arc ratio on cylinders (normal
/// z-component identically zero), Clairaut constant on revolution surfaces.
std::optional<geode::ConservationReport> auto_report(const geode::Surface& surface,
                                                     const geode::Trajectory& t) {
  bool spherical = true;
  bool cylindrical = true;
  const std::size_t stride = std::max<std::size_t>(1, t.samples.size() / 32);
  for (std::size_t k = 0; k < t.samples.size(); k += stride) {
    const geode::Vec3 n = surface.normal_at(t.samples[k].position);
    const geode::Vec3 p = t.samples[k].position;
    if (n.cross(p).norm() > 1e-9 * n.norm() * p.norm()) spherical = false;
    if (std::abs(n.z()) > 1e-9 * n.norm()) cylindrical = false;
    if (!spherical && !cylindrical) break;
  }
  if (spherical) return geode::plane_constant(t);
  if (cylindrical) return geode::cylinder_ratio(t);
  if (surface.family() == geode::Surface::Family::Revolution)
    return geode::clairaut_constant(t);
  return std::nullopt;
}

int cmd_check(const geode::RunConfig& config) {
  const geode::Surface surface = load_surface(config.surface_path);
  const int per_axis = config.samples.value_or(5);
  const double tol = config.tolerance.value_or(1e-10);

  geode::IntegrabilityReport report;
  if (surface.family() == geode::Surface::Family::Ruled) {
    const auto range = surface.omega_range();
    std::vector<double> omegas;
    for (int i = 0; i <= per_axis * per_axis; ++i)
      omegas.push_back(range[0] + (range[1] - range[0]) * i / (per_axis * per_axis));
    report = geode::validate_developable(surface.ruled_family(), omegas,
                                         config.tolerance.value_or(1e-9));
  } else {
    auto span_of = [](const std::optional<std::array<double, 2>>& hint) {
      return hint.value_or(std::array<double, 2>{-1.0, 1.0});
    };
    const auto xr = span_of(surface.domain().x);
    const auto yr = span_of(surface.domain().y);
    const auto zr = span_of(surface.domain().z);
    report.tolerance = tol;
    report.integrable = true;
    for (int i = 0; i < per_axis; ++i)
      for (int j = 0; j < per_axis; ++j)
        for (int k = 0; k < per_axis; ++k) {
          const geode::Vec3 p(
              xr[0] + (xr[1] - xr[0]) * (i + 0.5) / per_axis,
              yr[0] + (yr[1] - yr[0]) * (j + 0.5) / per_axis,
              zr[0] + (zr[1] - zr[0]) * (k + 0.5) / per_axis);
          double residual;
          try {
            residual = surface.integrability_residual(p);
          } catch (const geode::Error&) {
            continue;  // outside the formula's domain or degenerate normal
          }
          report.points.push_back(p);
          report.residuals.push_back(residual);
          report.max_abs = std::max(report.max_abs, std::abs(residual));
          if (std::abs(residual) >= tol) report.integrable = false;
        }
    if (report.residuals.empty())
      throw geode::GeometryError("check: no usable sample points in the domain box");
  }
  std::cout << geode::to_json_text(report) << "\n";
  return report.integrable ? kExitSuccess : kExitCheckFailure;
}

int cmd_trace(const geode::RunConfig& config) {
  const geode::Surface surface = load_surface(config.surface_path);
  geode::Vec3 start_pos = *config.start;
  if (surface.has_level()) {
    const double level = surface.level_at(start_pos);
    if (std::abs(level) > 1e-6)
      throw geode::GeometryError("trace: start point is off-surface (level " +
                                 geode::format_double(level) + ")");
    if (std::abs(level) > 1e-12)
      std::cerr << "note: start point projected onto the surface (level "
                << geode::format_double(level) << ")\n";
  }
  const geode::GeodesicState start =
      geode::make_state(surface, start_pos, *config.direction);
  const geode::Trajectory t =
      geode::trace(surface, start, *config.length, config.step.value_or(1e-3));

  std::ostringstream csv;
  t.write_csv(csv);
  if (!config.out_path.empty())
    write_file(config.out_path, csv.str());
  else
    std::cout << csv.str();

  if (const auto report = auto_report(surface, t))
    std::cout << geode::to_json_text(*report) << "\n";
  return kExitSuccess;
}

int cmd_connect(const geode::RunConfig& config) {
  const geode::Surface surface = load_surface(config.surface_path);
  geode::ConnectRequest request;
  request.a = *config.endpoint_a;
  request.b = *config.endpoint_b;
  request.step = config.step.value_or(1e-2);
  request.max_length = config.max_length.value_or(10.0);
  request.tolerance = config.tolerance.value_or(1e-6);
  const geode::ConnectResult result = geode::connect(surface, request);
  std::string csv_path = config.out_path;
  if (!csv_path.empty()) {
    std::ostringstream csv;
    result.trajectory.write_csv(csv);
    write_file(csv_path, csv.str());
  }
  std::cout << geode::to_json_text(result, csv_path) << "\n";
  return kExitSuccess;
}

int cmd_quadrature(const geode::RunConfig& config) {
  if (config.t_of_u) {
    const geode::Expression t_of_u = geode::Expression::parse(*config.t_of_u);
    const geode::WuQuadrature wu = geode::reduced_wu_quadrature_full(
        t_of_u, *config.u0, *config.u1, config.w0.value_or(0.0),
        config.nodes.value_or(128));
    std::ostringstream out;
    out << "{\n  \"w1\": " << geode::format_double(wu.w1)
        << ",\n  \"delta_arctan\": " << geode::format_double(wu.delta_arctan)
        << ",\n  \"nodes\": " << wu.integral.nodes
        << ",\n  \"est_error\": " << geode::format_double(wu.integral.est_error)
        << "\n}\n";
    std::cout << out.str();
    return kExitSuccess;
  }
  const geode::Surface surface = load_surface(config.surface_path);
  const geode::QuadratureResult result = geode::revolution_quadrature(
      surface, *config.clairaut_a, *config.v0, *config.v1, config.nodes.value_or(128));
  std::cout << geode::to_json_text(result) << "\n";
  return kExitSuccess;
}

int cmd_develop(const geode::RunConfig& config) {
  const geode::Surface surface = load_surface(config.surface_path);
  if (surface.family() != geode::Surface::Family::Ruled)
    throw geode::GeometryError("develop: surface must be a cone or developable family");
  const geode::RuledFamily& family = surface.ruled_family();

  std::ifstream in(*config.trajectory_path);
  if (!in)
    throw geode::ParseError("cannot open trajectory '" + *config.trajectory_path + "'", 0);
  const geode::Trajectory t = geode::Trajectory::read_csv(in);

  geode::DevelopmentMap map;
  if (family.is_cone()) {
    std::vector<geode::Vec3> points;
    std::vector<double> arc;
    for (const auto& g : t.samples) {
      points.push_back(g.position);
      arc.push_back(g.s);
    }
    map = geode::develop_cone(family, points, arc, surface.omega_range());
  } else {
    map = geode::develop_ruled(family, t, surface.omega_range());
  }

  if (!config.out_path.empty()) {
    std::ostringstream csv;
    map.write_csv(csv);
    write_file(config.out_path, csv.str());
  }
  std::cout << geode::development_summary_json(map) << "\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geodesic toolkit: trace, check, connect, reduce and unroll"};
  app.require_subcommand(1);

  geode::RunConfig config;
  bool dump_config = false;
  std::string start_text, dir_text, a_text, b_text;

  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--dump-config", dump_config,
                  "print the resolved configuration as JSON and exit");
    sub->add_option("--out", config.out_path, "output file path");
    sub->add_option("--format", config.format, "output format (csv|json)");
  };

  CLI::App* check = app.add_subcommand("check", "integrability / developability check");
  check->add_option("--surface", config.surface_path, "surface JSON file")->required();
  check->add_option("--samples", config.samples, "grid samples per axis");
  check->add_option("--tol", config.tolerance, "residual tolerance");
  add_common(check);

  CLI::App* trace = app.add_subcommand("trace", "trace a geodesic");
  trace->add_option("--surface", config.surface_path, "surface JSON file")->required();
  trace->add_option("--start", start_text, "start point x,y,z")->required();
  trace->add_option("--dir", dir_text, "initial direction x,y,z")->required();
  trace->add_option("--length", config.length, "arc length to trace")->required();
  trace->add_option("--step", config.step, "integration step (default 1e-3)");
  add_common(trace);

  CLI::App* connect = app.add_subcommand("connect", "two-point shortest geodesic");
  connect->add_option("--surface", config.surface_path, "surface JSON file")->required();
  connect->add_option("--a", a_text, "first endpoint x,y,z")->required();
  connect->add_option("--b", b_text, "second endpoint x,y,z")->required();
  connect->add_option("--step", config.step, "integration step (default 1e-2)");
  connect->add_option("--max-length", config.max_length, "shooting length budget");
  connect->add_option("--tol", config.tolerance, "terminal miss tolerance");
  add_common(connect);

  CLI::App* quadrature = app.add_subcommand(
      "quadrature", "revolution azimuth sweep or reduced slope-equation advance");
  quadrature->add_option("--surface", config.surface_path,
                         "surface JSON file (revolution mode)");
  quadrature->add_option("--A", config.clairaut_a, "Clairaut constant (revolution mode)");
  quadrature->add_option("--v0", config.v0, "lower parallel");
  quadrature->add_option("--v1", config.v1, "upper parallel");
  quadrature->add_option("--t-of-u", config.t_of_u, "slope magnitude t(u) formula");
  quadrature->add_option("--u0", config.u0, "lower slope-ratio bound");
  quadrature->add_option("--u1", config.u1, "upper slope-ratio bound");
  quadrature->add_option("--w0", config.w0, "initial reduced slope w");
  quadrature->add_option("--nodes", config.nodes, "Gauss-Legendre nodes (default 128)");
  add_common(quadrature);

  CLI::App* develop = app.add_subcommand("develop", "unroll a trajectory to the plane");
  develop->add_option("--surface", config.surface_path, "surface JSON file")->required();
  develop
      ->add_option("--trajectory", config.trajectory_path, "trajectory CSV to unroll")
      ->required();
  add_common(develop);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (!start_text.empty()) config.start = parse_triple(start_text);
    if (!dir_text.empty()) config.direction = parse_triple(dir_text);
    if (!a_text.empty()) config.endpoint_a = parse_triple(a_text);
    if (!b_text.empty()) config.endpoint_b = parse_triple(b_text);

    if (check->parsed()) config.subcommand = "check";
    if (trace->parsed()) config.subcommand = "trace";
    if (connect->parsed()) config.subcommand = "connect";
    if (quadrature->parsed()) config.subcommand = "quadrature";
    if (develop->parsed()) config.subcommand = "develop";

    if (dump_config) {
      std::cout << config.to_json_text() << "\n";
      return kExitSuccess;
    }

    if (check->parsed()) return cmd_check(config);
    if (trace->parsed()) return cmd_trace(config);
    if (connect->parsed()) return cmd_connect(config);
    if (quadrature->parsed()) {
      if (!config.t_of_u && (config.surface_path.empty() || !config.clairaut_a ||
                             !config.v0 || !config.v1)) {
        std::cerr << "quadrature needs either --t-of-u/--u0/--u1 or --surface/--A/--v0/--v1\n";
        return kExitUsage;
      }
      if (config.t_of_u && (!config.u0 || !config.u1)) {
        std::cerr << "quadrature --t-of-u needs --u0 and --u1\n";
        return kExitUsage;
      }
      return cmd_quadrature(config);
    }
    if (develop->parsed()) return cmd_develop(config);
    return kExitUsage;
  } catch (const geode::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const geode::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}
