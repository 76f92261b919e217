#include "geode/report_json.hpp"

#include <nlohmann/json.hpp>

namespace geode {

namespace {
using nlohmann::json;
}

std::string to_json_text(const ConservationReport& report) {
  json j;
  j["quantity"] = report.quantity;
  j["mean"] = report.mean;
  j["max_dev"] = report.max_abs_dev;
  j["drift_per_unit_s"] = report.drift_per_unit_s;
  j["samples_used"] = report.samples_used;
  j["samples_skipped"] = report.samples_skipped;
  if (report.plane) {
    j["plane"] = {report.plane->normal.x(), report.plane->normal.y(),
                  report.plane->normal.z()};
    j["plane_fit_residual"] = report.plane->max_residual;
  }
  if (report.proportionality_max_err)
    j["proportionality_max_err"] = *report.proportionality_max_err;
  return j.dump(2);
}

std::string to_json_text(const IntegrabilityReport& report) {
  json j;
  j["max_abs_residual"] = report.max_abs;
  j["tolerance"] = report.tolerance;
  j["integrable"] = report.integrable;
  j["samples"] = report.residuals.size();
  return j.dump(2);
}

std::string to_json_text(const QuadratureResult& result) {
  json j;
  j["value"] = result.value;
  j["lo"] = result.lo;
  j["hi"] = result.hi;
  j["nodes"] = result.nodes;
  j["est_error"] = result.est_error;
  return j.dump(2);
}

std::string to_json_text(const ConnectResult& result, const std::string& csv_path) {
  json j;
  j["length"] = result.length;
  j["miss"] = result.miss;
  j["iterations"] = result.iterations;
  j["multiplicity"] = result.multiplicity;
  j["csv_path"] = csv_path;
  j["solution_lengths"] = result.solution_lengths;
  return j.dump(2);
}

std::string development_summary_json(const DevelopmentMap& map) {
  json j;
  j["family"] = map.family;
  j["points"] = map.image.size();
  j["straightness_residual"] = map.straightness;
  double developed = 0.0;
  for (std::size_t k = 1; k < map.image.size(); ++k)
    developed += (map.image[k] - map.image[k - 1]).norm();
  j["developed_length"] = developed;
  return j.dump(2);
}

}  // namespace geode
