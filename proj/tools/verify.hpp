#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace spectral_ncd::cli {

struct SuiteResult {
  std::string name;
  int passed = 0;
  int total = 0;
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();

  bool ok() const { return passed == total; }
};

/// Suite names in canonical order.
const std::vector<std::string>& suite_names();

bool is_suite(const std::string& name);

/// Runs one suite. Instances get seeds derived from (seed, suite, index), so
/// results do not depend on thread count or scheduling.
SuiteResult run_suite(const std::string& name, std::uint64_t seed);

/// Runs the selected suites (all when empty) in canonical order.
std::vector<SuiteResult> run_suites(const std::vector<std::string>& selected, std::uint64_t seed);

nlohmann::ordered_json verify_report(const std::vector<SuiteResult>& results, std::uint64_t seed);

}  // namespace spectral_ncd::cli
