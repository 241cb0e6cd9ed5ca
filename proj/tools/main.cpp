#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config.hpp"
#include "report.hpp"
#include "spectral_ncd/errors.hpp"
#include "verify.hpp"

namespace fs = std::filesystem;
using namespace spectral_ncd;
using namespace spectral_ncd::cli;

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitInvalid = 2;

// Writes atomically enough for our purposes: render first, then open the file.
void write_text(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
  out << text;
}

void print_summary(const nlohmann::ordered_json& report) {
  const auto& r = report.at("residual").at("value");
  std::cout << "residual: " << (r.is_null() ? std::string("null") : r.dump()) << "\n";
  std::cout << "theorem4 verdict: " << report.at("theorem4").at("verdict").get<std::string>() << "\n";
  for (const auto& w : report.at("warnings")) std::cout << "warning: " << w.get<std::string>() << "\n";
}

int run_analyze(const std::string& config_path, const std::string& out_dir) {
  const ScenarioConfig c = load_config(config_path);
  const auto report = analyze(c);
  write_text(out_dir, "report.json", dump(report));
  print_summary(report);
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir) {
  const ScenarioConfig c = load_config(config_path);
  if (!c.sweep) throw ConfigError("field 'sweep': missing");
  std::ostringstream csv;
  write_sweep(csv, c);
  write_text(out_dir, "sweep.csv", csv.str());
  std::cout << "wrote " << (fs::path(out_dir) / "sweep.csv").string() << " (" << c.sweep->steps << " rows)\n";
  return 0;
}

int run_verify(const std::vector<std::string>& suites, std::uint64_t seed, const std::string& out_dir) {
  for (const auto& s : suites) {
    if (!is_suite(s)) {
      std::cerr << "unknown suite '" << s << "'; expected one of:";
      for (const auto& n : suite_names()) std::cerr << ' ' << n;
      std::cerr << "\n";
      return kExitInvalid;
    }
  }
  const auto results = run_suites(suites, seed);
  bool all = true;
  for (const auto& r : results) {
    all = all && r.ok();
    std::cout << r.name << ": " << r.passed << "/" << r.total << (r.ok() ? " pass" : " FAIL") << "\n";
  }
  if (!out_dir.empty()) write_text(out_dir, "verify.json", dump(verify_report(results, seed)));
  return all ? 0 : kExitFailed;
}

int run_toy(const std::string& which, double tau_s, double tau_c, std::optional<double> t, bool normalized,
            const std::string& out_dir) {
  ScenarioConfig c;
  c.mode = Mode::toy;
  c.k = 2;
  c.toy.params.tau_s = tau_s;
  c.toy.params.tau_c = tau_c;
  c.toy.normalized = normalized;
  if (t) {
    if (which == "3") throw ConfigError("option '--t' applies to cases 1 and 2 only");
    c.toy.which = ToyCase::general_t;
    c.toy.t = t;
  } else {
    c.toy.which = which == "1" ? ToyCase::case1 : which == "2" ? ToyCase::case2 : ToyCase::case3;
  }
  const auto report = analyze(c);
  write_text(out_dir, "report.json", dump(report));
  print_summary(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral analysis of novel class discovery: toy model, bounds and verification suites"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  auto* analyze_cmd = app.add_subcommand("analyze", "Analyze one scenario and write report.json");
  analyze_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  analyze_cmd->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the configured toy sweep and write sweep.csv");
  sweep_cmd->add_option("--config", config_path, "Scenario config (JSON)")->required();
  sweep_cmd->add_option("--out", out_dir, "Output directory")->required();

  std::vector<std::string> suites;
  std::uint64_t seed = 0;
  std::string verify_out;
  auto* verify_cmd = app.add_subcommand("verify", "Run verification suites (all when none are named)");
  verify_cmd->add_option("suites", suites, "Suite names");
  verify_cmd->add_option("--seed", seed, "Base seed for randomized suites");
  verify_cmd->add_option("--out", verify_out, "Directory for verify.json");

  std::string which;
  double tau_s = 0.25, tau_c = 0.2;
  std::optional<double> t;
  bool normalized = false;
  auto* toy_cmd = app.add_subcommand("toy", "Analyze a toy scenario and write report.json");
  toy_cmd->add_option("--case", which, "Toy case")->required()->check(CLI::IsMember({"1", "2", "3"}));
  toy_cmd->add_option("--tau-s", tau_s, "Shape similarity")->required();
  toy_cmd->add_option("--tau-c", tau_c, "Color similarity")->required();
  toy_cmd->add_option("--t", t, "Labeled-to-red strength (general T(t) family)");
  toy_cmd->add_flag("--normalized", normalized, "Use the normalized graph of T squared");
  toy_cmd->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  try {
    if (*analyze_cmd) return run_analyze(config_path, out_dir);
    if (*sweep_cmd) return run_sweep(config_path, out_dir);
    if (*verify_cmd) return run_verify(suites, seed, verify_out);
    if (*toy_cmd) return run_toy(which, tau_s, tau_c, t, normalized, out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailed;
  }
  return kExitInvalid;
}
