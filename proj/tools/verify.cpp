#include "verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "report.hpp"
#include "spectral_ncd/bound_analyzer.hpp"
#include "spectral_ncd/nscl_objective.hpp"
#include "spectral_ncd/parallel.hpp"
#include "spectral_ncd/random_instances.hpp"
#include "spectral_ncd/residual_probe.hpp"
#include "spectral_ncd/spectral_engine.hpp"
#include "spectral_ncd/toy_lab.hpp"

namespace spectral_ncd::cli {
namespace {

using nlohmann::ordered_json;

Index pick(Rng& rng, Index lo, Index hi) { return std::uniform_int_distribution<Index>(lo, hi)(rng); }

// One outcome per instance: pass flag plus the error it was judged on.
struct Outcome {
  bool ok = true;
  double error = 0.0;
  bool skipped = false;
};

// Runs n seeded instances in parallel and tallies them in index order.
template <class Fn>
std::vector<Outcome> instances(std::size_t n, std::uint64_t seed, std::uint64_t stream, Fn&& fn) {
  std::vector<Outcome> out(n);
  const std::uint64_t base = derive_seed(seed, stream);
  parallel_for(n, [&](std::size_t i) {
    Rng rng(derive_seed(base, i));
    out[i] = fn(rng);
  });
  return out;
}

void tally(SuiteResult& r, const std::vector<Outcome>& outs, const std::string& label) {
  int pass = 0, counted = 0;
  double worst = 0.0;
  for (const Outcome& o : outs) {
    if (o.skipped) continue;
    ++counted;
    if (o.ok) ++pass;
    worst = std::max(worst, o.error);
  }
  r.passed += pass;
  r.total += counted;
  r.metrics[label] = {{"instances", counted}, {"passed", pass}, {"max_error", worst}};
}

void check(SuiteResult& r, const std::string& label, bool ok, double value) {
  r.total += 1;
  if (ok) r.passed += 1;
  r.metrics[label] = {{"ok", ok}, {"value", value}};
}

double brute_force_assignment(const Matrix& counts) {
  const Index n = std::max(counts.rows(), counts.cols());
  Matrix sq = Matrix::Zero(n, n);
  sq.topLeftCorner(counts.rows(), counts.cols()) = counts;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = 0.0;
  do {
    double v = 0.0;
    for (Index i = 0; i < n; ++i) v += sq(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::vector<int> random_labels(Rng& rng, Index n, int classes) {
  std::vector<int> out(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> d(0, classes - 1);
  for (auto& v : out) v = d(rng);
  return out;
}

WeightedGraph random_graph(Rng& rng, Index n_min, Index n_max) {
  const Matrix a = random_adjacency(rng, n_min, n_max);
  return WeightedGraph::from_adjacency(a, pick(rng, 1, a.rows() - 2));
}

SuiteResult thm1(std::uint64_t seed) {
  SuiteResult r{"thm1"};
  tally(r, instances(120, seed, 1, [](Rng& rng) {
          const PopulationSpec s = random_population(rng, 10);
          const Matrix f = random_matrix(rng, s.n_points(), pick(rng, 1, 4));
          const NsclBreakdown b = nscl_loss(s, FeatureMap(f));
          const WeightedGraph g = build_adjacency(s);
          const double ref = truncation_loss(g, FeatureMap(f).scaled(g.degrees));
          const double err = std::abs(b.total + b.equivalence_constant - ref) / std::max(1.0, std::abs(ref));
          return Outcome{err < 1e-8, err};
        }),
        "offset_identity");
  tally(r, instances(12, seed, 2, [](Rng& rng) {
          const PopulationSpec s = random_population(rng, 8);
          const SpectralEmbedding e = decompose(build_adjacency(s), 2);
          if (e.eigengap < 0.05) return Outcome{true, 0.0, true};
          MinimizeOptions opt;
          opt.k = 2;
          opt.seed = rng();
          const MinimizeResult m = minimize_nscl(s, opt);
          return Outcome{m.certificate < 1e-3, m.certificate};
        }),
        "minimizer_certificate");
  return r;
}

SuiteResult gradients(std::uint64_t seed) {
  SuiteResult r{"gradients"};
  tally(r, instances(30, seed, 3, [](Rng& rng) {
          const PopulationSpec s = random_population(rng, 10);
          const Matrix f = random_matrix(rng, s.n_points(), pick(rng, 1, 3));
          const Matrix g = nscl_gradient(s, FeatureMap(f));
          const double h = 1e-5;
          double worst = 0.0;
          for (Index i = 0; i < f.rows(); ++i) {
            for (Index j = 0; j < f.cols(); ++j) {
              Matrix fp = f, fm = f;
              fp(i, j) += h;
              fm(i, j) -= h;
              const double fd = (nscl_loss(s, FeatureMap(fp)).total - nscl_loss(s, FeatureMap(fm)).total) / (2 * h);
              worst = std::max(worst, std::abs(fd - g(i, j)) / std::max(1e-3, std::abs(g(i, j))));
            }
          }
          return Outcome{worst < 1e-4, worst};
        }),
        "central_differences");
  return r;
}

SuiteResult lemma1(std::uint64_t seed) {
  SuiteResult r{"lemma1"};
  tally(r, instances(500, seed, 4, [](Rng& rng) {
          const WeightedGraph g = random_graph(rng, 4, 10);
          const SpectralEmbedding e = decompose(g, pick(rng, 1, g.size() - 1));
          const auto labels = random_labels(rng, g.n_unlabeled, static_cast<int>(pick(rng, 2, 3)));
          const ProbeResult p = probe(e, LabelMatrix::from_labels(labels));
          const double slack = 0.5 * static_cast<double>(p.zero_one_error_ls) - p.residual_total;
          return Outcome{slack <= 0.0, std::max(0.0, slack)};
        }),
        "residual_dominates_half_error");
  return r;
}

SuiteResult thm2(std::uint64_t) {
  SuiteResult r{"thm2"};
  const ToyParams helpful{1.0, 0.25, 0.2, 0.0}, other{1.0, 0.2, 0.25, 0.0};
  const auto res = [](ToyCase c, const ToyParams& p) { return toy_residual(build_toy(c, p)).numeric; };
  const double a = res(ToyCase::case1, helpful), b = res(ToyCase::case2, helpful);
  const double c = res(ToyCase::case1, other), d = res(ToyCase::case2, other);
  check(r, "case1_tau_s_above_tau_c", std::abs(a) < 1e-6, a);
  check(r, "case2_tau_s_above_tau_c", std::abs(b - 1.0) < 1e-6, b);
  check(r, "case1_tau_s_below_tau_c", std::abs(c) < 1e-6, c);
  check(r, "case2_tau_s_below_tau_c", std::abs(d) < 1e-6, d);
  return r;
}

SuiteResult thm3(std::uint64_t) {
  SuiteResult r{"thm3"};
  const ToyParams p{1.0, 0.25, 0.2, 0.0};
  const double tb = *toy_threshold(p.tau_s, p.tau_c);
  std::vector<double> grid{0.0};
  for (int i = 1; i < 200; ++i) grid.push_back(p.tau_s * i / 200.0);
  const auto rows = sweep_t(p, grid);
  int bad_law = 0, bad_mono = 0, bad_range = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    if (i > 0 && row.residual_numeric > rows[i - 1].residual_numeric + 1e-9) ++bad_mono;
    if (row.t == 0.0 && std::abs(row.residual_numeric - 1.0) >= 1e-6) ++bad_range;
    if (row.t > 0.0 && row.t < tb && !(row.residual_numeric > 0.0 && row.residual_numeric < 1.0)) ++bad_range;
    if (row.t > tb && row.residual_numeric >= 1e-6) ++bad_range;
    if (row.t > 0.0 && row.t < tb) {
      const double law = toy_r(row.lambda[0], p.tau_s, p.tau_c);
      worst = std::max(worst, std::abs(law - row.residual_numeric));
      if (std::abs(law - row.residual_numeric) >= 1e-6) ++bad_law;
    }
  }
  check(r, "threshold", std::abs(tb - 0.0816497) < 1e-7, tb);
  check(r, "regimes", bad_range == 0, bad_range);
  check(r, "r_law", bad_law == 0, worst);
  check(r, "monotone", bad_mono == 0, bad_mono);

  // Closed-form spectrum over a 10 x 10 x 10 grid inside tau_c < tau_s < 1.5 tau_c.
  std::vector<Outcome> grid_out(1000);
  parallel_for(1000, [&](std::size_t n) {
    const int a = static_cast<int>(n / 100), b = static_cast<int>(n / 10 % 10), c = static_cast<int>(n % 10);
    const double tau_c = 0.1 + 0.02 * a;
    const double tau_s = tau_c * (1.0 + 0.5 * (b + 0.5) / 10.0);
    const double t = tau_s * (c + 0.5) / 10.0;
    const ToyScenario sc = build_toy(ToyCase::general_t, {1.0, tau_s, tau_c, 0.0}, t);
    const ToyPrediction pred = closed_form_oracle(sc);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(sc.matrix);
    double err = 0.0;
    for (Index i = 0; i < 5; ++i) {
      err = std::max(err, std::abs(es.eigenvalues()(4 - i) - pred.eigenvalues(i)));
      const Vector v = pred.eigenvectors.col(i);
      err = std::max(err, (sc.matrix * v - pred.eigenvalues(i) * v).norm());
      if (pred.from_cubic[static_cast<std::size_t>(i)]) {
        err = std::max(err, std::abs(toy_cubic(pred.eigenvalues(i) - 1.0, tau_s, tau_c, t)));
      }
    }
    grid_out[n] = Outcome{err < 1e-9, err};
  });
  tally(r, grid_out, "closed_form_grid");
  return r;
}

SuiteResult lemma3(std::uint64_t) {
  SuiteResult r{"lemma3"};
  const ToyParams p{1.0, 0.2, 0.25, 0.0};
  const double r3 = toy_residual(build_toy(ToyCase::case3, p)).numeric;
  const double r2 = toy_residual(build_toy(ToyCase::case2, p)).numeric;
  check(r, "harm", std::abs(r3 - r2 - 1.0) < 1e-6, r3 - r2);
  return r;
}

SuiteResult thm4(std::uint64_t seed) {
  SuiteResult r{"thm4"};
  const auto bounds = instances(500, seed, 5, [](Rng& rng) {
    const WeightedGraph g = random_graph(rng, 4, 12);
    const SpectralEmbedding e = decompose(g, pick(rng, 1, g.size() - 1));
    const Vector y = random_binary(rng, g.n_unlabeled);
    const KnowledgeDecomposition kd = theorem4_analysis(e, y);
    return Outcome{kd.residual <= kd.theorem4_bound + 1e-9, std::max(0.0, kd.residual - kd.theorem4_bound)};
  });
  tally(r, bounds, "projection_bound");
  tally(r, instances(500, seed, 5, [](Rng& rng) {
          const WeightedGraph g = random_graph(rng, 4, 12);
          const SpectralEmbedding e = decompose(g, pick(rng, 1, g.size() - 1));
          const Vector y = random_binary(rng, g.n_unlabeled);
          const ConditionCheck c = theorem4_condition(e, g, y);
          if (c.verdict == Verdict::ill_posed) return Outcome{true, 0.0, true};
          const bool agree = (c.verdict == Verdict::holds) == (c.residual < 1e-8);
          return Outcome{agree, agree ? 0.0 : 1.0};
        }),
        "condition_agrees_with_residual");
  return r;
}

SuiteResult thmc2(std::uint64_t seed) {
  SuiteResult r{"thmC2"};
  tally(r, instances(200, seed, 6, [](Rng& rng) {
          const ApproxGraph ap = random_psd_block_approx(rng, pick(rng, 1, 4), pick(rng, 2, 8));
          const Vector y = random_binary(rng, ap.n_unlabeled());
          const CoverageReport cov = coverage_analysis(ap, pick(rng, 1, ap.size() - 1), y);
          const double gap = std::abs(cov.residual_bar - cov.exact_identity_rhs);
          return Outcome{gap < 1e-8, gap};
        }),
        "exact_identity");
  tally(r, instances(60, seed, 7, [](Rng& rng) {
          const ApproxGraph ap = random_psd_block_approx(rng, pick(rng, 1, 3), pick(rng, 3, 7));
          const Index k = pick(rng, 1, 3);
          const Index nu = ap.n_unlabeled();
          const CoverageReport base = coverage_analysis(ap, k, Vector::Ones(nu));
          if (base.index_set.empty() || base.theta != 0) return Outcome{true, 0.0, true};
          // Labels making every omega equal: solve yᵀ(σ_i - A_uu)⁻¹η_u = 1 on the index set.
          Matrix g(nu, static_cast<Index>(base.index_set.size()));
          for (std::size_t a = 0; a < base.index_set.size(); ++a) {
            const double s = base.sigma_bar(base.index_set[a]);
            g.col(static_cast<Index>(a)) = (s * Matrix::Identity(nu, nu) - ap.a_uu).partialPivLu().solve(ap.eta_u);
          }
          const Vector y = g.transpose().completeOrthogonalDecomposition().solve(Vector::Ones(g.cols()));
          const CoverageReport cov = coverage_analysis(ap, k, y);
          const double err = cov.kappa_undefined ? 1.0 : std::abs(std::abs(cov.kappa) - 1.0);
          return Outcome{err < 1e-6, err};
        }),
        "equal_omega_full_coverage");
  return r;
}

SuiteResult lemmac1(std::uint64_t seed) {
  SuiteResult r{"lemmaC1"};
  tally(r, instances(200, seed, 8, [](Rng& rng) {
          const ApproxGraph ap = random_psd_block_approx(rng, pick(rng, 1, 4), pick(rng, 2, 7));
          const LbarStructure s = lbar_structure_check(ap, pick(rng, 1, ap.n_unlabeled()));
          const double err = std::max({s.top_row_spread, s.rest_row_spread, s.trailing_dot});
          return Outcome{s.holds && err < 1e-8, err};
        }),
        "structure");
  return r;
}

SuiteResult lemmac6(std::uint64_t seed) {
  SuiteResult r{"lemmaC6"};
  constexpr std::size_t kCount = 60;
  const auto outs = instances(kCount, seed, 9, [](Rng& rng) {
    const Index n = pick(rng, 1, 6);
    const Vector w = random_matrix(rng, n, 1, 0.1, 5.0).col(0);
    const CosineMinimum m = cosine_functional_min(w, rng());
    return Outcome{m.closed_form_gap < 1e-6, m.closed_form_gap};
  });
  tally(r, outs, "closed_form");
  // The sqrt(w_i) + sqrt(w_j) denominator, evaluated on the same vectors for the record.
  const std::uint64_t base = derive_seed(seed, 9);
  double worst = 0.0;
  int mismatched = 0;
  for (std::size_t i = 0; i < kCount; ++i) {
    Rng rng(derive_seed(base, i));
    const Index n = pick(rng, 1, 6);
    const Vector w = random_matrix(rng, n, 1, 0.1, 5.0).col(0);
    const CosineMinimum m = cosine_functional_min(w, rng());
    worst = std::max(worst, m.sqrt_denominator_gap);
    if (m.sqrt_denominator_gap >= 1e-6) ++mismatched;
  }
  r.metrics["sqrt_denominator_form"] = {{"instances", static_cast<int>(kCount)},
                                {"mismatched", mismatched},
                                {"max_gap", worst},
                                {"note", "denominator sqrt(w_i) + sqrt(w_j) disagrees with the numeric minimum"}};
  return r;
}

SuiteResult hungarian(std::uint64_t seed) {
  SuiteResult r{"hungarian"};
  tally(r, instances(240, seed, 10, [](Rng& rng) {
          const Index n = pick(rng, 4, 12);
          const int clusters = static_cast<int>(pick(rng, 1, 5));
          const int classes = static_cast<int>(pick(rng, 1, 5));
          std::vector<Index> assign(static_cast<std::size_t>(n));
          for (auto& a : assign) a = pick(rng, 0, clusters - 1);
          const auto labels = random_labels(rng, n, classes);
          std::map<Index, Index> cc;
          std::map<int, Index> lc;
          for (Index a : assign) cc.emplace(a, 0);
          for (int l : labels) lc.emplace(l, 0);
          Index next = 0;
          for (auto& kv : cc) kv.second = next++;
          next = 0;
          for (auto& kv : lc) kv.second = next++;
          Matrix counts = Matrix::Zero(static_cast<Index>(cc.size()), static_cast<Index>(lc.size()));
          for (std::size_t i = 0; i < assign.size(); ++i) counts(cc[assign[i]], lc[labels[i]]) += 1.0;
          const double brute = brute_force_assignment(counts) / static_cast<double>(n);
          const double acc = assignment_accuracy(assign, labels);
          return Outcome{std::abs(acc - brute) < 1e-12, std::abs(acc - brute)};
        }),
        "bijection_maximum");
  return r;
}

using SuiteFn = std::function<SuiteResult(std::uint64_t)>;

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"thm1", thm1},       {"lemma1", lemma1},   {"thm2", thm2},     {"thm3", thm3},
      {"lemma3", lemma3},   {"thm4", thm4},       {"thmC2", thmc2},   {"lemmaC1", lemmac1},
      {"lemmaC6", lemmac6}, {"hungarian", hungarian}, {"gradients", gradients},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [name, _] : registry()) n.push_back(name);
    return n;
  }();
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  for (const auto& [n, fn] : registry()) {
    if (n == name) return fn(seed);
  }
  throw std::invalid_argument("unknown suite '" + name + "'");
}

std::vector<SuiteResult> run_suites(const std::vector<std::string>& selected, std::uint64_t seed) {
  std::vector<SuiteResult> out;
  for (const auto& name : suite_names()) {
    if (selected.empty() || std::find(selected.begin(), selected.end(), name) != selected.end()) {
      out.push_back(run_suite(name, seed));
    }
  }
  return out;
}

ordered_json verify_report(const std::vector<SuiteResult>& results, std::uint64_t seed) {
  ordered_json out;
  out["tool"] = "spectral_ncd";
  out["version"] = kToolVersion;
  out["seed"] = seed;
  ordered_json warnings = ordered_json::array();
  ordered_json suites = ordered_json::array();
  bool all = true;
  for (const SuiteResult& r : results) {
    all = all && r.ok();
    ordered_json s;
    s["name"] = r.name;
    s["passed"] = r.passed;
    s["total"] = r.total;
    s["ok"] = r.ok();
    s["metrics"] = r.metrics;
    suites.push_back(s);
  }
  sanitize(suites, warnings);
  out["warnings"] = warnings;
  out["all_passed"] = all;
  out["suites"] = suites;
  return out;
}

}  // namespace spectral_ncd::cli
