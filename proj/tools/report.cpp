#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "spectral_ncd/bound_analyzer.hpp"
#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/nscl_objective.hpp"
#include "spectral_ncd/parallel.hpp"
#include "spectral_ncd/residual_probe.hpp"
#include "spectral_ncd/spectral_engine.hpp"

namespace spectral_ncd::cli {
namespace {

using nlohmann::ordered_json;

ordered_json vec(const Vector& v) {
  ordered_json a = ordered_json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

template <class T>
ordered_json list(const std::vector<T>& xs) {
  ordered_json a = ordered_json::array();
  for (const auto& x : xs) a.push_back(x);
  return a;
}

void add_warnings(ordered_json& warnings, const std::vector<std::string>& ws, const std::string& origin) {
  for (const auto& w : ws) warnings.push_back(origin + ": " + w);
}

// What every mode reduces to before the shared analysis.
struct Prepared {
  Matrix matrix;        // the matrix whose spectrum defines U*
  Index n_labeled = 0;
  Vector y;
  std::vector<int> labels;  // class per unlabeled row, for the probe
  std::optional<ApproxGraph> approx;
  ordered_json scenario = ordered_json::object();
  ordered_json toy;     // closed-form section, toy mode only
  std::vector<std::string> warnings;
};

std::vector<int> binary_labels(const Vector& y) {
  std::vector<int> out(static_cast<std::size_t>(y.size()));
  for (Index i = 0; i < y.size(); ++i) out[static_cast<std::size_t>(i)] = y(i) > 0.5 ? 1 : 0;
  return out;
}

Prepared prepare_toy(const ScenarioConfig& c) {
  Prepared p;
  const ToyScenario sc = build_toy(c.toy.which, c.toy.params, c.toy.t);
  p.warnings = sc.warnings;
  p.n_labeled = 1;
  p.y = sc.y;
  p.labels = binary_labels(sc.y);
  if (c.toy.normalized) {
    p.matrix = WeightedGraph::from_adjacency(sc.adjacency(), 1).normalized;
  } else {
    p.matrix = sc.matrix;
  }
  p.approx = build_approx(p.matrix, 1);
  p.scenario["case"] = to_string(sc.which);
  p.scenario["tau1"] = sc.params.tau1;
  p.scenario["tau_s"] = sc.params.tau_s;
  p.scenario["tau_c"] = sc.params.tau_c;
  p.scenario["tau0"] = sc.params.tau0;
  p.scenario["t"] = sc.t;
  p.scenario["normalized"] = c.toy.normalized;

  p.toy = ordered_json::object();
  p.toy["t_bar"] = opt(toy_threshold(sc.params.tau_s, sc.params.tau_c));
  if (sc.extreme_regime() && !c.toy.normalized) {
    const ToyPrediction pred = closed_form_oracle(sc);
    p.toy["regime"] = pred.regime;
    p.toy["residual_predicted"] = opt(pred.residual_predicted);
    p.toy["closed_form_eigenvalues"] = vec(pred.eigenvalues);
  } else {
    p.toy["regime"] = c.toy.normalized ? "normalized graph: no closed-form law" : "closed forms need tau1 = 1, tau0 = 0";
    p.toy["residual_predicted"] = nullptr;
  }
  return p;
}

Prepared prepare_population(const ScenarioConfig& c) {
  Prepared p;
  const WeightedGraph g = build_adjacency(c.population);
  p.matrix = g.normalized;
  p.n_labeled = g.n_labeled;
  p.labels = c.labels;
  const int target = c.target_class ? *c.target_class : *std::min_element(c.labels.begin(), c.labels.end());
  p.y = Vector(static_cast<Index>(c.labels.size()));
  for (std::size_t i = 0; i < c.labels.size(); ++i) p.y(static_cast<Index>(i)) = c.labels[i] == target ? 1.0 : 0.0;
  if (g.n_labeled >= 1) {
    p.approx = build_approx(g);
  } else {
    p.warnings.push_back("no labeled points; approximation analysis skipped");
  }
  p.scenario["n_points"] = g.size();
  p.scenario["n_labeled_points"] = g.n_labeled;
  p.scenario["alpha"] = c.population.alpha;
  p.scenario["beta"] = c.population.beta;
  p.scenario["target_class"] = target;
  p.scenario["total_mass"] = g.adjacency.sum();
  return p;
}

Prepared prepare_approx(const ScenarioConfig& c) {
  Prepared p;
  const ApproxGraph ap = ApproxGraph::from_blocks(c.approx.n_labeled, c.approx.eta_l, c.approx.eta_u, c.approx.a_uu);
  p.matrix = ap.a_bar;
  p.n_labeled = ap.n_labeled;
  p.y = c.y;
  p.labels = binary_labels(c.y);
  p.approx = ap;
  p.scenario["n_labeled"] = ap.n_labeled;
  p.scenario["n_unlabeled"] = ap.n_unlabeled();
  p.scenario["eta_l"] = ap.eta_l;
  return p;
}

ordered_json coverage_json(const CoverageReport& cov, ordered_json& warnings) {
  add_warnings(warnings, cov.warnings, "coverage");
  ordered_json j;
  j["a_uu_psd"] = cov.a_uu_psd;
  j["theta"] = cov.theta;
  j["kappa"] = cov.kappa;
  j["kappa_undefined"] = cov.kappa_undefined;
  j["ignorance_degree"] = cov.ignorance_degree;
  j["residual_bar"] = cov.residual_bar;
  j["exact_identity_rhs"] = cov.exact_identity_rhs;
  j["exact_identity_gap"] = std::abs(cov.residual_bar - cov.exact_identity_rhs);
  j["kappa_lower_bound"] = opt(cov.kappa_lower_bound);
  j["index_set"] = list(cov.index_set);
  j["omega"] = vec(cov.omega);
  j["excluded_pairs"] = list(cov.excluded_pairs);
  j["eigengap_term"] = opt(cov.eigengap_term);
  j["mean_unlabeled_deficiency"] = opt(cov.mean_unlabeled_deficiency);
  return j;
}

ordered_json cosine_json(const CoverageReport& cov, std::uint64_t seed, ordered_json& warnings) {
  if (cov.omega.size() == 0) return nullptr;
  // The functional is scale invariant and symmetric in sign, so |ω| is used.
  const Vector w = cov.omega.cwiseAbs();
  if ((w.array() <= 0.0).any()) {
    warnings.push_back("cosine functional: an omega entry is zero; minimum not computed");
    return nullptr;
  }
  if ((cov.omega.array() < 0.0).any() && (cov.omega.array() > 0.0).any()) {
    warnings.push_back("cosine functional: omega entries differ in sign; magnitudes used");
  }
  const CosineMinimum m = cosine_functional_min(w, seed);
  ordered_json j;
  j["numeric_minimum"] = m.min_value;
  j["closed_form"] = m.closed_form;
  j["closed_form_gap"] = m.closed_form_gap;
  j["sqrt_denominator_form"] = m.sqrt_denominator_form;
  j["sqrt_denominator_gap"] = m.sqrt_denominator_gap;
  j["note"] = "sqrt_denominator_form uses the denominator sqrt(w_i) + sqrt(w_j); it is not scale invariant";
  return j;
}

}  // namespace

void sanitize(ordered_json& j, ordered_json& warnings, const std::string& path) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) {
    warnings.push_back("non-finite value at " + path + " reported as null");
    j = nullptr;
  } else if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) sanitize(it.value(), warnings, path.empty() ? it.key() : path + "." + it.key());
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) sanitize(j[i], warnings, path + "[" + std::to_string(i) + "]");
  }
}

ordered_json analyze(const ScenarioConfig& c) {
  Prepared p;
  switch (c.mode) {
    case Mode::toy: p = prepare_toy(c); break;
    case Mode::population: p = prepare_population(c); break;
    case Mode::approx: p = prepare_approx(c); break;
  }
  ordered_json warnings = ordered_json::array();
  add_warnings(warnings, p.warnings, "scenario");

  const Index k = c.k;
  if (k > p.matrix.rows()) throw InvalidInput("k exceeds the graph size");
  const SpectralEmbedding e = decompose(p.matrix, p.n_labeled, k);
  if (e.degenerate_gap) warnings.push_back("spectrum: eigengap at k below tolerance; U* is not unique");

  ordered_json body;
  body["spectrum"] = {{"eigenvalues", vec(e.eigenvalues)}, {"eigengap", e.eigengap}, {"degenerate_gap", e.degenerate_gap}};

  const ProbeResult pr = probe(e, LabelMatrix::from_labels(p.labels));
  const LeastSquares ls = residual(e.u_top, p.y);
  body["residual"] = {{"value", ls.residual},
                      {"total_over_classes", pr.residual_total},
                      {"per_class", vec(pr.residual_per_class)},
                      {"zero_one_error_ls", pr.zero_one_error_ls},
                      {"zero_one_error_note", "least-squares classifier; an upper-bound surrogate for the linear probing error"}};

  ordered_json t4;
  if (p.n_labeled >= 1) {
    const KnowledgeDecomposition kd = theorem4_analysis(e, p.y);
    const ConditionCheck cc = theorem4_condition(e, p.matrix, p.y);
    t4["bound"] = kd.theorem4_bound;
    t4["ignorance_degree"] = kd.ignorance_degree;
    t4["verdict"] = std::string(to_string(cc.verdict));
    t4["feasibility_residual"] = cc.feasibility_residual;
    t4["coincident_indices"] = list(cc.coincident);
    if (cc.verdict == Verdict::ill_posed) warnings.push_back("theorem4: an eigenvalue coincides with one of A_uu; condition ill-posed");
  } else {
    t4["verdict"] = std::string(to_string(Verdict::not_applicable));
  }
  body["theorem4"] = t4;

  if (p.approx) {
    const ApproxGraph& ap = *p.approx;
    ordered_json a;
    const CoverageReport cov = coverage_analysis(ap, k, p.y);
    const LbarStructure st = lbar_structure_check(ap, k);
    if (st.assumption_violated) warnings.push_back("structure: A_uu is not PSD; assumption_violated");
    const ApproxErrorBound b = approx_error_bound(p.matrix, ap, k, p.y);
    add_warnings(warnings, b.warnings, "approximation bound");
    ordered_json cosine = cosine_json(cov, c.seed, warnings);
    a["perturbation"] = b.perturbation;
    a["bound"] = {{"lhs", b.lhs}, {"rhs", opt(b.rhs)}, {"ratio", opt(b.ratio)}, {"gap_ok", b.gap_ok}};
    a["coverage"] = coverage_json(cov, warnings);
    a["structure"] = {{"assumption_violated", st.assumption_violated},
                      {"holds", st.holds},
                      {"theta", st.theta},
                      {"zero_columns", st.zero_columns},
                      {"top_row_spread", st.top_row_spread},
                      {"rest_row_spread", st.rest_row_spread},
                      {"trailing_dot", st.trailing_dot}};
    a["cosine_functional"] = cosine;
    ordered_json ratios = ordered_json::array();
    for (const OmegaRatioRow& r : omega_ratio_diagnostics(ap, k, p.y)) {
      ratios.push_back({{"i", r.i}, {"j", r.j}, {"omega_ratio", r.omega_ratio}, {"r_ratio", opt(r.r_ratio)}});
    }
    a["omega_ratios"] = ratios;
    body["approximation"] = a;
  }

  if (c.mode == Mode::toy) {
    ordered_json toy = p.toy;
    if (toy["residual_predicted"].is_number()) {
      toy["agrees"] = std::abs(toy["residual_predicted"].get<double>() - ls.residual) < 1e-6;
    }
    body["toy"] = toy;
  }

  if (c.cluster) {
    body["cluster_accuracy"] =
        cluster_accuracy(e.u_top, p.labels, static_cast<Index>(LabelMatrix::from_labels(p.labels).n_classes()), c.seed);
  }
  if (c.nscl) {
    if (c.mode != Mode::population) {
      warnings.push_back("nscl: the contrastive loss needs a population; skipped");
    } else {
      MinimizeOptions opt_nscl;
      opt_nscl.k = k;
      opt_nscl.seed = c.seed;
      const MinimizeResult m = minimize_nscl(c.population, opt_nscl);
      if (!m.converged) warnings.push_back("nscl: minimizer hit the iteration cap");
      body["nscl"] = {{"certificate", m.certificate},
                      {"loss", m.breakdown.total},
                      {"equivalence_constant", m.breakdown.equivalence_constant},
                      {"converged", m.converged},
                      {"iterations", m.iterations}};
    }
  }

  sanitize(body, warnings);
  ordered_json out;
  out["tool"] = "spectral_ncd";
  out["version"] = kToolVersion;
  out["seed"] = c.seed;
  out["mode"] = to_string(c.mode);
  out["k"] = k;
  out["warnings"] = warnings;
  out["scenario"] = p.scenario;
  for (auto it = body.begin(); it != body.end(); ++it) out[it.key()] = it.value();
  return out;
}

void write_sweep(std::ostream& os, const ScenarioConfig& c) {
  if (!c.sweep || c.mode != Mode::toy) throw InvalidInput("no toy sweep configured");
  const SweepConfig& s = *c.sweep;
  const std::vector<double> grid = s.grid();
  if (s.parameter == "t") {
    write_sweep_csv(os, sweep_t(c.toy.params, grid, c.toy.normalized));
    return;
  }
  // Build every scenario first so an invalid grid point fails before any work.
  std::vector<ToyScenario> scenarios;
  scenarios.reserve(grid.size());
  for (double v : grid) {
    ToyParams p = c.toy.params;
    (s.parameter == "tau_s" ? p.tau_s : p.tau_c) = v;
    scenarios.push_back(build_toy(c.toy.which, p, c.toy.t));
  }
  std::vector<ToyResidual> res(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { res[i] = toy_residual(scenarios[i], c.toy.normalized); });

  os << s.parameter << ",residual_numeric,residual_predicted,t_bar,lambda1,lambda2,lambda3,lambda4,lambda5\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto tb = toy_threshold(scenarios[i].params.tau_s, scenarios[i].params.tau_c);
    os << format_double(grid[i]) << ',' << format_double(res[i].numeric) << ','
       << (res[i].predicted ? format_double(*res[i].predicted) : "") << ',' << (tb ? format_double(*tb) : "");
    for (Index j = 0; j < 5; ++j) os << ',' << format_double(res[i].eigenvalues(j));
    os << '\n';
  }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace spectral_ncd::cli
