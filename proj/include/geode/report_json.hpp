#pragma once

#include "geode/bvp.hpp"
#include "geode/develop.hpp"
#include "geode/quadrature.hpp"
#include "geode/reduction.hpp"
#include "geode/surface.hpp"

#include <string>

namespace geode {

/// JSON forms of the report types (2-space indent, alphabetical keys,
/// shortest round-trip numbers; byte-deterministic for identical inputs).
std::string to_json_text(const ConservationReport& report);
std::string to_json_text(const IntegrabilityReport& report);
std::string to_json_text(const QuadratureResult& result);
std::string to_json_text(const ConnectResult& result, const std::string& csv_path);
std::string development_summary_json(const DevelopmentMap& map);

}  // namespace geode
