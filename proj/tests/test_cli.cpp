#include "geode/run_config.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout only
};

std::string cli_path() {
  const char* env = std::getenv("GEODE_CLI");
  REQUIRE_MESSAGE(env != nullptr, "GEODE_CLI must point at the geode binary");
  return env;
}

RunResult run_cli(const std::string& args) {
  const std::string command = cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string output;
  char buffer[4096];
  std::size_t n;
  while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, n);
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

fs::path fixture_dir() {
  const fs::path dir = fs::temp_directory_path() / "geode_cli_tests";
  fs::create_directories(dir);
  return dir;
}

fs::path write_fixture(const std::string& name, const std::string& contents) {
  const fs::path path = fixture_dir() / name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("cli: check exit codes follow the contract") {
  const auto sphere = write_fixture("sphere.json", R"json({"kind":"implicit","F":"x^2+y^2+z^2-1"})json");
  const auto rot = write_fixture("rot.json", R"json({"kind":"normal-field","p":"y","q":"-x","r":"1"})json");
  const auto bad = write_fixture("bad.json", "{not json");

  const RunResult ok = run_cli("check --surface " + sphere.string());
  CHECK(ok.exit_code == 0);
  CHECK(nlohmann::json::parse(ok.output)["integrable"] == true);

  const RunResult violated = run_cli("check --surface " + rot.string());
  CHECK(violated.exit_code == 2);
  CHECK(nlohmann::json::parse(violated.output)["max_abs_residual"] == 2.0);

  CHECK(run_cli("check --surface " + bad.string()).exit_code == 64);
  CHECK(run_cli("check").exit_code == 64);             // missing required flag
  CHECK(run_cli("frobnicate").exit_code == 64);        // unknown subcommand
  CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli: trace writes the CSV contract and a matching report") {
  const auto sphere = write_fixture("sphere.json", R"json({"kind":"implicit","F":"x^2+y^2+z^2-1"})json");
  const fs::path csv = fixture_dir() / "gc.csv";
  const std::string args = "trace --surface " + sphere.string() +
                           " --start 1,0,0 --dir 0,1,0 --length 6.283185307179586 "
                           "--step 0.001 --out " +
                           csv.string();
  const RunResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  const auto report = nlohmann::json::parse(first.output);
  CHECK(report["quantity"] == "plane-constant");
  CHECK(report["max_dev"].get<double>() < 1e-7);

  const std::string contents = slurp(csv);
  CHECK(contents.substr(0, 37) == "s,x,y,z,vx,vy,vz,lambda,level_residual");

  // determinism: identical invocation, byte-identical outputs
  const RunResult second = run_cli(args);
  CHECK(second.output == first.output);
  CHECK(slurp(csv) == contents);
}

TEST_CASE("cli: trace rejects an off-surface start") {
  const auto sphere = write_fixture("sphere.json", R"json({"kind":"implicit","F":"x^2+y^2+z^2-1"})json");
  const RunResult r = run_cli("trace --surface " + sphere.string() +
                              " --start 1.5,0,0 --dir 0,1,0 --length 1 --step 0.001");
  CHECK(r.exit_code == 2);
}

TEST_CASE("cli: cylinder trace attaches the height-arc report") {
  const auto cyl = write_fixture("cyl.json", R"json({"kind":"implicit","F":"x^2+y^2-1"})json");
  const RunResult r = run_cli(
      "trace --surface " + cyl.string() +
      " --start 1,0,0 --dir 0,0.7071067811865476,0.7071067811865476 --length 5 "
      "--step 0.001 --out " +
      (fixture_dir() / "helix.csv").string());
  CHECK(r.exit_code == 0);
  const auto report = nlohmann::json::parse(r.output);
  CHECK(report["quantity"] == "cylinder-ratio");
  CHECK(report["proportionality_max_err"].get<double>() < 1e-8);
}

TEST_CASE("cli: connect reports length, miss and multiplicity") {
  const auto plane = write_fixture("plane.json", R"json({"kind":"graph","zeta":"0"})json");
  const RunResult r = run_cli("connect --surface " + plane.string() +
                              " --a 0,0,0 --b 3,4,0 --max-length 6 --step 0.01");
  CHECK(r.exit_code == 0);
  const auto report = nlohmann::json::parse(r.output);
  CHECK(std::abs(report["length"].get<double>() - 5.0) < 1e-6);
  CHECK(report["multiplicity"] == false);
}

TEST_CASE("cli: quadrature in both modes") {
  const auto sphere_rev =
      write_fixture("sphere_rev.json", R"json({"kind":"revolution","z_of_v":"sqrt(1-v^2)"})json");
  const RunResult rev = run_cli("quadrature --surface " + sphere_rev.string() +
                                " --A 0.5 --v0 0.5 --v1 1 --nodes 128");
  CHECK(rev.exit_code == 0);
  CHECK(std::abs(nlohmann::json::parse(rev.output)["value"].get<double>() -
                 1.5707963267948966) < 1e-6);

  const RunResult wu = run_cli("quadrature --t-of-u 1 --u0 0 --u1 1 --w0 0");
  CHECK(wu.exit_code == 0);
  const auto parsed = nlohmann::json::parse(wu.output);
  const double w1 = parsed["w1"].get<double>();
  CHECK(std::abs(std::atan(w1) - (M_PI / 4.0) / std::sqrt(2.0)) < 1e-10);

  CHECK(run_cli("quadrature --u0 0 --u1 1").exit_code == 64);  // incomplete mode
}

TEST_CASE("cli: develop unrolls a traced cone geodesic") {
  const auto cone_rev = write_fixture(
      "cone_rev.json", R"json({"kind":"revolution","z_of_v":"v","domain":{"v":[0.2,3]}})json");
  const auto cone_ruled = write_fixture(
      "cone_ruled.json",
      R"json({"kind":"cone","A":"tan(w)","B":"1/cos(w)","domain":{"omega":[-1.3,1.3]}})json");
  const fs::path csv = fixture_dir() / "cone_geo.csv";
  const RunResult traced =
      run_cli("trace --surface " + cone_rev.string() +
              " --start 1,0,1 --dir 0.4,1,0.4 --length 1.5 --step 0.001 --out " +
              csv.string());
  REQUIRE(traced.exit_code == 0);

  const fs::path dev_csv = fixture_dir() / "cone_dev.csv";
  const RunResult dev = run_cli("develop --surface " + cone_ruled.string() +
                                " --trajectory " + csv.string() + " --out " +
                                dev_csv.string());
  CHECK(dev.exit_code == 0);
  const auto summary = nlohmann::json::parse(dev.output);
  CHECK(summary["family"] == "cone");
  CHECK(summary["straightness_residual"].get<double>() < 1e-5);
  CHECK(slurp(dev_csv).substr(0, 19) == "s,xi,eta,omega,rho\n");

  const auto twisted = write_fixture(
      "twisted.json",
      R"json({"kind":"developable","A":"w","B":"w^2","C":"w^2","D":"(2/3)*w^3"})json");
  CHECK(run_cli("check --surface " + twisted.string()).exit_code == 2);
}

TEST_CASE("cli: config round-trips through its JSON form") {
  const auto sphere = write_fixture("sphere.json", R"json({"kind":"implicit","F":"x^2+y^2+z^2-1"})json");
  const RunResult dumped =
      run_cli("trace --surface " + sphere.string() +
              " --start 1,0,0 --dir 0,1,0 --length 2 --step 0.001 --dump-config");
  CHECK(dumped.exit_code == 0);
  const geode::RunConfig config = geode::RunConfig::from_json_text(dumped.output);
  CHECK(config.to_json_text() + "\n" == dumped.output);
  CHECK(config.subcommand == "trace");
  CHECK(geode::RunConfig::from_json_text(config.to_json_text()) == config);
}
