#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "spectral_ncd/population_graph.hpp"
#include "spectral_ncd/toy_lab.hpp"

namespace spectral_ncd::cli {

/// Config problems: malformed JSON, missing or mistyped fields, failed
/// invariants. The message names the line or the field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { toy, population, approx };

struct ToyConfig {
  ToyCase which = ToyCase::case1;
  ToyParams params;
  std::optional<double> t;
  bool normalized = false;  // use D^{-1/2} T² D^{-1/2} instead of T
};

struct ApproxConfig {
  Index n_labeled = 1;
  double eta_l = 0.0;
  Vector eta_u;
  Matrix a_uu;
};

struct SweepConfig {
  std::string parameter;  // t, tau_s or tau_c
  double from = 0.0;
  double to = 0.0;
  int steps = 1;

  std::vector<double> grid() const;
};

struct ScenarioConfig {
  int version = 1;
  Mode mode = Mode::toy;
  Index k = 2;
  std::uint64_t seed = 0;
  ToyConfig toy;
  PopulationSpec population;
  ApproxConfig approx;
  std::vector<int> labels;       // class per unlabeled point (population mode)
  std::optional<int> target_class;
  Vector y;                      // approx mode label vector
  bool nscl = false;             // also run the contrastive minimizer
  bool cluster = false;          // also report K-means cluster accuracy
  std::optional<SweepConfig> sweep;
};

std::string to_string(Mode m);

/// Parses JSON text; `base_dir` resolves a relative `population_path`.
ScenarioConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ScenarioConfig load_config(const std::string& path);

PopulationSpec population_from_json(const nlohmann::json& j, const std::string& where = "population");

}  // namespace spectral_ncd::cli
