#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace spectral_ncd::cli {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("field '" + field + "': " + what);
}

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) fail(join(where, key), "missing");
  return obj.at(key);
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "must be finite");
  return v;
}

long long as_integer(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<long long>();
}

bool as_bool(const json& j, const std::string& field) {
  if (!j.is_boolean()) fail(field, "expected true or false");
  return j.get<bool>();
}

double number_or(const json& obj, const std::string& key, const std::string& where, double fallback) {
  return obj.contains(key) ? as_number(obj.at(key), join(where, key)) : fallback;
}

Vector as_vector(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Index>(i)) = as_number(j[i], field + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string row = field + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) fail(row, "rows must be arrays of equal length");
    m.row(static_cast<Index>(r)) = as_vector(j[r], row).transpose();
  }
  return m;
}

Index as_index(const json& j, const std::string& field) {
  const long long v = as_integer(j, field);
  if (v < 0) fail(field, "must be non-negative");
  return static_cast<Index>(v);
}

ToyCase parse_case(const json& j, const std::string& field) {
  const std::string s = j.is_string() ? j.get<std::string>() : j.is_number_integer() ? std::to_string(j.get<int>()) : "";
  if (s == "1") return ToyCase::case1;
  if (s == "2") return ToyCase::case2;
  if (s == "3") return ToyCase::case3;
  if (s == "t") return ToyCase::general_t;
  fail(field, "expected one of 1, 2, 3, \"t\"");
}

ToyConfig parse_toy(const json& j) {
  if (!j.is_object()) fail("toy", "expected an object");
  ToyConfig t;
  t.which = parse_case(require(j, "case", "toy"), "toy.case");
  t.params.tau1 = number_or(j, "tau1", "toy", 1.0);
  t.params.tau_s = number_or(j, "tau_s", "toy", t.params.tau_s);
  t.params.tau_c = number_or(j, "tau_c", "toy", t.params.tau_c);
  t.params.tau0 = number_or(j, "tau0", "toy", 0.0);
  if (j.contains("t")) t.t = as_number(j.at("t"), "toy.t");
  if (j.contains("normalized")) t.normalized = as_bool(j.at("normalized"), "toy.normalized");
  if (t.which == ToyCase::general_t && !t.t) fail("toy.t", "required when case is \"t\"");
  return t;
}

ApproxConfig parse_approx(const json& j) {
  if (!j.is_object()) fail("approx", "expected an object");
  ApproxConfig a;
  a.n_labeled = as_index(require(j, "n_labeled", "approx"), "approx.n_labeled");
  if (a.n_labeled < 1) fail("approx.n_labeled", "must be at least 1");
  a.eta_l = as_number(require(j, "eta_l", "approx"), "approx.eta_l");
  a.eta_u = as_vector(require(j, "eta_u", "approx"), "approx.eta_u");
  a.a_uu = as_matrix(require(j, "a_uu", "approx"), "approx.a_uu");
  if (a.a_uu.rows() != a.a_uu.cols()) fail("approx.a_uu", "must be square");
  if (a.a_uu.rows() != a.eta_u.size()) fail("approx.eta_u", "length must match approx.a_uu");
  if ((a.a_uu - a.a_uu.transpose()).cwiseAbs().maxCoeff() > 1e-12) fail("approx.a_uu", "must be symmetric");
  return a;
}

SweepConfig parse_sweep(const json& j) {
  if (!j.is_object()) fail("sweep", "expected an object");
  SweepConfig s;
  const json& p = require(j, "parameter", "sweep");
  if (!p.is_string()) fail("sweep.parameter", "expected a string");
  s.parameter = p.get<std::string>();
  if (s.parameter != "t" && s.parameter != "tau_s" && s.parameter != "tau_c") {
    fail("sweep.parameter", "expected one of t, tau_s, tau_c");
  }
  s.from = as_number(require(j, "from", "sweep"), "sweep.from");
  s.to = as_number(require(j, "to", "sweep"), "sweep.to");
  const long long steps = as_integer(require(j, "steps", "sweep"), "sweep.steps");
  if (steps < 1 || steps > 1000000) fail("sweep.steps", "must lie in [1, 1000000]");
  s.steps = static_cast<int>(steps);
  if (s.to < s.from) fail("sweep.to", "must not be below sweep.from");
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw ConfigError(source + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
}

}  // namespace

std::vector<double> SweepConfig::grid() const {
  std::vector<double> g(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    g[static_cast<std::size_t>(i)] = steps == 1 ? from : from + (to - from) * i / (steps - 1);
  }
  return g;
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::toy: return "toy";
    case Mode::population: return "population";
    case Mode::approx: return "approx";
  }
  return "toy";
}

PopulationSpec population_from_json(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  PopulationSpec s;
  s.aug_prob = as_matrix(require(j, "aug_prob", where), join(where, "aug_prob"));
  if (j.contains("natural_labeled")) {
    const json& nl = j.at("natural_labeled");
    if (!nl.is_array()) fail(join(where, "natural_labeled"), "expected an array");
    for (std::size_t i = 0; i < nl.size(); ++i) {
      const std::string f = join(where, "natural_labeled[" + std::to_string(i) + "]");
      if (!nl[i].is_object()) fail(f, "expected {\"row\": n, \"class\": c}");
      LabeledNatural n;
      n.row = as_index(require(nl[i], "row", f), f + ".row");
      n.class_id = static_cast<int>(as_integer(require(nl[i], "class", f), f + ".class"));
      s.natural_labeled.push_back(n);
    }
  }
  if (j.contains("natural_unlabeled")) {
    const json& nu = j.at("natural_unlabeled");
    if (!nu.is_array()) fail(join(where, "natural_unlabeled"), "expected an array of row indices");
    for (std::size_t i = 0; i < nu.size(); ++i) {
      s.natural_unlabeled.push_back(as_index(nu[i], join(where, "natural_unlabeled[" + std::to_string(i) + "]")));
    }
  }
  s.class_prior_labeled = j.contains("class_prior_labeled")
                              ? as_vector(j.at("class_prior_labeled"), join(where, "class_prior_labeled"))
                              : Vector(0);
  s.unlabeled_prior = j.contains("unlabeled_prior")
                          ? as_vector(j.at("unlabeled_prior"), join(where, "unlabeled_prior"))
                          : Vector(0);
  s.n_labeled_points = j.contains("n_labeled_points")
                           ? as_index(j.at("n_labeled_points"), join(where, "n_labeled_points"))
                           : 0;
  s.alpha = number_or(j, "alpha", where, 1.0);
  s.beta = number_or(j, "beta", where, 1.0);
  try {
    s.validate();
  } catch (const std::exception& e) {
    fail(where, e.what());
  }
  return s;
}

ScenarioConfig parse_config(const std::string& text, const std::string& base_dir) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ScenarioConfig c;
  c.version = static_cast<int>(as_integer(require(j, "version", ""), "version"));
  if (c.version != 1) fail("version", "unsupported version " + std::to_string(c.version));

  const json& mode = require(j, "mode", "");
  const std::string m = mode.is_string() ? mode.get<std::string>() : "";
  if (m == "toy") {
    c.mode = Mode::toy;
  } else if (m == "population") {
    c.mode = Mode::population;
  } else if (m == "approx") {
    c.mode = Mode::approx;
  } else {
    fail("mode", "expected toy, population or approx");
  }

  if (j.contains("k")) {
    const long long k = as_integer(j.at("k"), "k");
    if (k < 1) fail("k", "must be at least 1");
    c.k = static_cast<Index>(k);
  }
  if (j.contains("seed")) {
    const long long seed = as_integer(j.at("seed"), "seed");
    if (seed < 0) fail("seed", "must be non-negative");
    c.seed = static_cast<std::uint64_t>(seed);
  }
  if (j.contains("nscl")) c.nscl = as_bool(j.at("nscl"), "nscl");
  if (j.contains("cluster")) c.cluster = as_bool(j.at("cluster"), "cluster");
  if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));

  switch (c.mode) {
    case Mode::toy:
      c.toy = parse_toy(require(j, "toy", ""));
      if (j.contains("k") && c.k != 2) fail("k", "toy scenarios use k = 2");
      break;
    case Mode::population: {
      if (j.contains("population_path")) {
        const json& p = j.at("population_path");
        if (!p.is_string()) fail("population_path", "expected a string");
        std::filesystem::path path(p.get<std::string>());
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        c.population = population_from_json(parse_json(read_file(path.string()), path.string()), "population");
      } else {
        c.population = population_from_json(require(j, "population", ""), "population");
      }
      const json& labels = require(j, "labels", "");
      if (!labels.is_array()) fail("labels", "expected an array of class ids");
      for (std::size_t i = 0; i < labels.size(); ++i) {
        c.labels.push_back(static_cast<int>(as_integer(labels[i], "labels[" + std::to_string(i) + "]")));
      }
      if (static_cast<Index>(c.labels.size()) != c.population.n_unlabeled_points()) {
        fail("labels", "expected " + std::to_string(c.population.n_unlabeled_points()) + " entries, one per unlabeled point");
      }
      if (j.contains("target_class")) {
        c.target_class = static_cast<int>(as_integer(j.at("target_class"), "target_class"));
        if (std::find(c.labels.begin(), c.labels.end(), *c.target_class) == c.labels.end()) {
          fail("target_class", "does not occur in labels");
        }
      }
      if (c.k > c.population.n_points()) fail("k", "exceeds the number of augmented points");
      break;
    }
    case Mode::approx:
      c.approx = parse_approx(require(j, "approx", ""));
      c.y = as_vector(require(j, "y", ""), "y");
      if (c.y.size() != c.approx.a_uu.rows()) fail("y", "length must match approx.a_uu");
      if (c.k > c.approx.n_labeled + c.approx.a_uu.rows()) fail("k", "exceeds the graph size");
      break;
  }
  if (c.sweep && c.mode != Mode::toy) fail("sweep", "sweeps are defined for toy scenarios only");
  if (c.sweep && c.sweep->parameter == "t" && c.toy.which != ToyCase::general_t) {
    fail("sweep.parameter", "a t sweep needs toy.case \"t\"");
  }
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  const std::filesystem::path p(path);
  return parse_config(text, p.has_parent_path() ? p.parent_path().string() : ".");
}

}  // namespace spectral_ncd::cli
