#pragma once

#include <ostream>
#include <string>

#include "config.hpp"
#include "json.hpp"

namespace spectral_ncd::cli {

inline constexpr const char* kToolVersion = "1.0.0";

/// Full analysis of one scenario. Key order is fixed, warnings come first and
/// non-finite numbers are replaced by null with a warning.
nlohmann::ordered_json analyze(const ScenarioConfig& config);

/// CSV for the configured toy sweep, rows in grid order.
void write_sweep(std::ostream& os, const ScenarioConfig& config);

/// Serialized form written to report.json (2-space indent, trailing newline).
std::string dump(const nlohmann::ordered_json& j);

/// Replaces non-finite numbers by null, appending one warning per field.
void sanitize(nlohmann::ordered_json& j, nlohmann::ordered_json& warnings, const std::string& path = "");

}  // namespace spectral_ncd::cli
