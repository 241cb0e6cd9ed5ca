#include "spectral_ncd/random_instances.hpp"

#include <algorithm>

namespace spectral_ncd {
namespace {

Index uniform_index(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = uniform(rng, lo, hi);
  }
  return m;
}

PopulationSpec random_population(Rng& rng, Index max_points) {
  max_points = std::max<Index>(max_points, 3);
  PopulationSpec s;
  const Index nl_pts = uniform_index(rng, 1, std::min<Index>(4, max_points - 2));
  const Index nu_pts = uniform_index(rng, 2, std::max<Index>(2, std::min<Index>(6, max_points - nl_pts)));
  const Index n_pts = nl_pts + nu_pts;
  const Index n_classes = uniform_index(rng, 1, 2);
  const Index n_unl = uniform_index(rng, 1, 3);

  std::vector<std::pair<int, Index>> labeled;  // (class, row)
  Index row = 0;
  for (Index c = 0; c < n_classes; ++c) {
    const Index per = uniform_index(rng, 1, 2);
    for (Index r = 0; r < per; ++r) labeled.emplace_back(static_cast<int>(c), row++);
  }
  const Index n_nat = row + n_unl;
  s.aug_prob = Matrix::Zero(n_nat, n_pts);
  for (const auto& [c, r] : labeled) {
    s.natural_labeled.push_back({r, c});
    for (Index x = 0; x < nl_pts; ++x) s.aug_prob(r, x) = uniform(rng, 0.05, 1.0);
  }
  for (Index u = 0; u < n_unl; ++u) {
    s.natural_unlabeled.push_back(row);
    for (Index x = nl_pts; x < n_pts; ++x) s.aug_prob(row, x) = uniform(rng, 0.05, 1.0);
    ++row;
  }
  for (Index r = 0; r < n_nat; ++r) s.aug_prob.row(r) /= s.aug_prob.row(r).sum();

  s.class_prior_labeled.resize(static_cast<Index>(labeled.size()));
  for (Index c = 0; c < n_classes; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (labeled[i].first == c) {
        s.class_prior_labeled(static_cast<Index>(i)) = uniform(rng, 0.1, 1.0);
        total += s.class_prior_labeled(static_cast<Index>(i));
      }
    }
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      if (labeled[i].first == c) s.class_prior_labeled(static_cast<Index>(i)) /= total;
    }
  }
  s.unlabeled_prior.resize(n_unl);
  for (Index u = 0; u < n_unl; ++u) s.unlabeled_prior(u) = uniform(rng, 0.1, 1.0);
  s.unlabeled_prior /= s.unlabeled_prior.sum();
  s.n_labeled_points = nl_pts;
  s.alpha = uniform(rng, 0.2, 2.0);
  s.beta = uniform(rng, 0.2, 2.0);
  return s;
}

Matrix random_adjacency(Rng& rng, Index n_min, Index n_max) {
  const Index n = uniform_index(rng, n_min, n_max);
  Matrix a = random_matrix(rng, n, n, 0.0, 1.0);
  a = 0.5 * (a + a.transpose()).eval();
  a.diagonal().array() += 0.5;  // keeps every degree well away from zero
  return a;
}

Vector random_binary(Rng& rng, Index n) {
  Vector y(n);
  std::bernoulli_distribution coin(0.5);
  for (Index i = 0; i < n; ++i) y(i) = coin(rng) ? 1.0 : 0.0;
  if (n >= 2) {
    if (y.sum() == 0.0) y(uniform_index(rng, 0, n - 1)) = 1.0;
    if (y.sum() == static_cast<double>(n)) y(uniform_index(rng, 0, n - 1)) = 0.0;
  }
  return y;
}

Matrix random_psd(Rng& rng, Index n, double diag_shift) {
  const Matrix b = random_matrix(rng, n, n, -1.0, 1.0);
  Matrix m = b * b.transpose() / static_cast<double>(n);
  m.diagonal().array() += diag_shift;
  return m;
}

ApproxGraph random_psd_block_approx(Rng& rng, Index n_labeled, Index n_unlabeled) {
  const Matrix a_uu = random_psd(rng, n_unlabeled);
  Vector eta_u(n_unlabeled);
  for (Index i = 0; i < n_unlabeled; ++i) eta_u(i) = uniform(rng, 0.05, 0.5);
  const double eta_l = uniform(rng, 0.2, 1.0);
  return ApproxGraph::from_blocks(n_labeled, eta_l, eta_u, a_uu);
}

}  // namespace spectral_ncd
