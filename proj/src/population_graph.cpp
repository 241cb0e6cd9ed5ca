#include "spectral_ncd/population_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "spectral_ncd/errors.hpp"

namespace spectral_ncd {
namespace {

constexpr double kProbTol = 1e-9;

std::string row_name(Index r) { return "aug_prob row " + std::to_string(r); }

}  // namespace

std::vector<int> PopulationSpec::labeled_classes() const {
  std::vector<int> ids;
  ids.reserve(natural_labeled.size());
  for (const auto& l : natural_labeled) ids.push_back(l.class_id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

void PopulationSpec::validate() const {
  const Index n_nat = aug_prob.rows();
  const Index n = aug_prob.cols();
  if (n_nat == 0 || n == 0) throw InvalidInput("aug_prob must be non-empty");
  if (!aug_prob.allFinite()) throw InvalidInput("aug_prob has non-finite entries");
  if (n_labeled_points < 0 || n_labeled_points > n) {
    throw InvalidInput("n_labeled_points must lie in [0, " + std::to_string(n) + "]");
  }
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InvalidInput("alpha and beta must be finite and nonnegative");
  }
  if (alpha == 0.0 && beta == 0.0) throw InvalidInput("alpha and beta are both zero");

  for (Index r = 0; r < n_nat; ++r) {
    if (aug_prob.row(r).minCoeff() < -kProbTol || aug_prob.row(r).maxCoeff() > 1.0 + kProbTol) {
      throw InvalidInput(row_name(r) + " has entries outside [0, 1]");
    }
    const double s = aug_prob.row(r).sum();
    if (std::abs(s - 1.0) > kProbTol) {
      throw InvalidInput(row_name(r) + " sums to " + std::to_string(s) + ", expected 1");
    }
  }

  std::vector<int> owner(static_cast<std::size_t>(n_nat), 0);
  auto claim = [&](Index r, const char* what) {
    if (r < 0 || r >= n_nat) {
      throw InvalidInput(std::string(what) + " refers to missing row " + std::to_string(r));
    }
    if (owner[static_cast<std::size_t>(r)]++ != 0) {
      throw InvalidInput(row_name(r) + " is listed more than once");
    }
  };
  for (const auto& l : natural_labeled) claim(l.row, "natural_labeled");
  for (Index r : natural_unlabeled) claim(r, "natural_unlabeled");
  for (Index r = 0; r < n_nat; ++r) {
    if (owner[static_cast<std::size_t>(r)] == 0) {
      throw InvalidInput(row_name(r) + " is neither labeled nor unlabeled");
    }
  }

  const Index nl = n_labeled_points;
  for (const auto& l : natural_labeled) {
    if (nl < n && aug_prob.row(l.row).tail(n - nl).maxCoeff() > kProbTol) {
      throw InvalidInput(row_name(l.row) + " (labeled) puts mass on unlabeled augmented points");
    }
  }
  for (Index r : natural_unlabeled) {
    if (nl > 0 && aug_prob.row(r).head(nl).maxCoeff() > kProbTol) {
      throw InvalidInput(row_name(r) + " (unlabeled) puts mass on labeled augmented points");
    }
  }

  if (class_prior_labeled.size() != static_cast<Index>(natural_labeled.size())) {
    throw InvalidInput("class_prior_labeled must have one entry per labeled natural sample");
  }
  if (unlabeled_prior.size() != static_cast<Index>(natural_unlabeled.size())) {
    throw InvalidInput("unlabeled_prior must have one entry per unlabeled natural sample");
  }
  std::map<int, double> per_class;
  for (std::size_t i = 0; i < natural_labeled.size(); ++i) {
    const double p = class_prior_labeled(static_cast<Index>(i));
    if (!(p >= 0.0)) throw InvalidInput("class_prior_labeled has a negative entry");
    per_class[natural_labeled[i].class_id] += p;
  }
  for (const auto& [cls, total] : per_class) {
    if (std::abs(total - 1.0) > kProbTol) {
      throw InvalidInput("class_prior_labeled for class " + std::to_string(cls) + " sums to " +
                         std::to_string(total));
    }
  }
  if (!natural_unlabeled.empty()) {
    if (unlabeled_prior.minCoeff() < 0.0) throw InvalidInput("unlabeled_prior has a negative entry");
    if (std::abs(unlabeled_prior.sum() - 1.0) > kProbTol) {
      throw InvalidInput("unlabeled_prior sums to " + std::to_string(unlabeled_prior.sum()));
    }
  }
}

Matrix PopulationSpec::class_mixtures() const {
  const auto classes = labeled_classes();
  Matrix m = Matrix::Zero(n_points(), static_cast<Index>(classes.size()));
  for (std::size_t i = 0; i < natural_labeled.size(); ++i) {
    const auto& l = natural_labeled[i];
    const auto col = std::lower_bound(classes.begin(), classes.end(), l.class_id) - classes.begin();
    m.col(col) += class_prior_labeled(static_cast<Index>(i)) * aug_prob.row(l.row).transpose();
  }
  return m;
}

Vector PopulationSpec::unlabeled_mixture() const {
  Vector mu = Vector::Zero(n_points());
  for (std::size_t i = 0; i < natural_unlabeled.size(); ++i) {
    mu += unlabeled_prior(static_cast<Index>(i)) *
          aug_prob.row(natural_unlabeled[i]).transpose();
  }
  return mu;
}

WeightedGraph WeightedGraph::from_adjacency(Matrix adjacency, Index n_labeled) {
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) throw InvalidInput("adjacency must be square");
  if (n_labeled < 0 || n_labeled > n) throw InvalidInput("n_labeled out of range");
  if (asymmetry(adjacency) > 1e-12) throw InvalidInput("adjacency is not symmetric");
  WeightedGraph g;
  g.adjacency = std::move(adjacency);
  g.degrees = g.adjacency.rowwise().sum();
  for (Index x = 0; x < n; ++x) {
    if (!(g.degrees(x) >= kMinDegree)) throw ZeroDegreeVertex(x, g.degrees(x));
  }
  const Vector inv_sqrt = g.degrees.cwiseSqrt().cwiseInverse();
  g.normalized = inv_sqrt.asDiagonal() * g.adjacency * inv_sqrt.asDiagonal();
  g.normalized = 0.5 * (g.normalized + g.normalized.transpose()).eval();
  g.n_labeled = n_labeled;
  g.n_unlabeled = n - n_labeled;
  return g;
}

Matrix raw_adjacency(const PopulationSpec& spec) {
  spec.validate();
  const Index n = spec.n_points();
  Matrix a = Matrix::Zero(n, n);

  // Labeled term: alpha * sum_i E_{x̄,x̄' ~ P_{l_i}} T(x|x̄) T(x'|x̄').
  const Matrix mix = spec.class_mixtures();
  if (spec.alpha != 0.0) a.noalias() += spec.alpha * mix * mix.transpose();

  // Unlabeled term: beta * E_{x̄ ~ P_u} T(x|x̄) T(x'|x̄).
  if (spec.beta != 0.0) {
    for (std::size_t i = 0; i < spec.natural_unlabeled.size(); ++i) {
      const Vector t = spec.aug_prob.row(spec.natural_unlabeled[i]).transpose();
      a.noalias() += spec.beta * spec.unlabeled_prior(static_cast<Index>(i)) * t * t.transpose();
    }
  }
  return 0.5 * (a + a.transpose());
}

WeightedGraph build_adjacency(const PopulationSpec& spec) {
  return WeightedGraph::from_adjacency(raw_adjacency(spec), spec.n_labeled_points);
}

ApproxGraph build_approx(const Matrix& normalized, Index n_labeled) {
  const Index n = normalized.rows();
  if (normalized.cols() != n) throw InvalidInput("normalized adjacency must be square");
  if (n_labeled < 1) throw InvalidInput("build_approx needs at least one labeled vertex");
  if (n_labeled > n) throw InvalidInput("n_labeled exceeds the graph size");
  const Index nu = n - n_labeled;

  ApproxGraph ap;
  ap.n_labeled = n_labeled;
  ap.source = normalized;
  ap.a_uu = normalized.bottomRightCorner(nu, nu);
  ap.a_ul = normalized.bottomLeftCorner(nu, n_labeled);
  ap.eta_l = normalized.topLeftCorner(n_labeled, n_labeled).mean();
  ap.eta_u = ap.a_ul.rowwise().mean();

  ap.a_bar.resize(n, n);
  ap.a_bar.topLeftCorner(n_labeled, n_labeled).setConstant(ap.eta_l);
  ap.a_bar.bottomLeftCorner(nu, n_labeled) = ap.eta_u.replicate(1, n_labeled);
  ap.a_bar.topRightCorner(n_labeled, nu) = ap.eta_u.transpose().replicate(n_labeled, 1);
  ap.a_bar.bottomRightCorner(nu, nu) = ap.a_uu;
  return ap;
}

ApproxGraph build_approx(const WeightedGraph& graph) {
  return build_approx(graph.normalized, graph.n_labeled);
}

ApproxGraph ApproxGraph::from_blocks(Index n_labeled, double eta_l, const Vector& eta_u,
                                     const Matrix& a_uu) {
  if (n_labeled < 1) throw InvalidInput("from_blocks needs at least one labeled vertex");
  if (a_uu.rows() != a_uu.cols() || a_uu.rows() != eta_u.size()) {
    throw InvalidInput("a_uu must be square and match eta_u");
  }
  const Index nu = a_uu.rows();
  const Index n = n_labeled + nu;
  Matrix a(n, n);
  a.topLeftCorner(n_labeled, n_labeled).setConstant(eta_l);
  a.bottomLeftCorner(nu, n_labeled) = eta_u.replicate(1, n_labeled);
  a.topRightCorner(n_labeled, nu) = eta_u.transpose().replicate(n_labeled, 1);
  a.bottomRightCorner(nu, nu) = a_uu;
  return build_approx(a, n_labeled);
}

}  // namespace spectral_ncd
