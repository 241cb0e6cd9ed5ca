#include "spectral_ncd/spectral_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spectral_ncd/errors.hpp"

namespace spectral_ncd {

Matrix SpectralEmbedding::vectors() const {
  Matrix v(size(), size());
  v << v_top, v_rest;
  return v;
}

SpectralEmbedding decompose(const Matrix& symmetric, Index n_labeled, Index k) {
  const Index n = symmetric.rows();
  if (symmetric.cols() != n || n == 0) throw InvalidInput("decompose needs a non-empty square matrix");
  if (k < 1 || k > n) throw InvalidInput("embedding dimension k must lie in [1, N]");
  if (n_labeled < 0 || n_labeled > n) throw InvalidInput("n_labeled out of range");
  if (!symmetric.allFinite()) throw InvalidInput("matrix has non-finite entries");
  const double scale = std::max(1.0, symmetric.cwiseAbs().maxCoeff());
  if (asymmetry(symmetric) > 1e-12 * scale) throw InvalidInput("matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric);
  const Vector& lam = es.eigenvalues();  // ascending

  // Order by |lambda| descending; ties keep the larger signed value first.
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    const double da = std::abs(lam(a)), db = std::abs(lam(b));
    if (da != db) return da > db;
    return lam(a) > lam(b);
  });

  SpectralEmbedding e;
  e.k = k;
  e.n_labeled = n_labeled;
  e.singular_values.resize(n);
  e.eigenvalues.resize(n);
  Matrix v(n, n);
  for (Index i = 0; i < n; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    e.eigenvalues(i) = lam(src);
    e.singular_values(i) = std::abs(lam(src));
    v.col(i) = es.eigenvectors().col(src);
    canonicalize_sign(v.col(i));
  }

  e.v_top = v.leftCols(k);
  e.v_rest = v.rightCols(n - k);
  const Index nu = n - n_labeled;
  e.l_top = e.v_top.topRows(n_labeled);
  e.u_top = e.v_top.bottomRows(nu);
  e.l_rest = e.v_rest.topRows(n_labeled);
  e.u_rest = e.v_rest.bottomRows(nu);
  e.f_star = e.v_top * e.singular_values.head(k).cwiseSqrt().asDiagonal();
  const double next = k < n ? e.singular_values(k) : 0.0;
  e.eigengap = e.singular_values(k - 1) - next;
  e.degenerate_gap = e.eigengap < kDegenerateGap;
  return e;
}

SpectralEmbedding decompose(const WeightedGraph& graph, Index k) {
  return decompose(graph.normalized, graph.n_labeled, k);
}

double truncation_loss(const Matrix& normalized, const Matrix& f) {
  if (f.rows() != normalized.rows()) {
    throw InvalidInput("feature matrix has " + std::to_string(f.rows()) + " rows, expected " +
                       std::to_string(normalized.rows()));
  }
  return (normalized - f * f.transpose()).squaredNorm();
}

double truncation_loss(const WeightedGraph& graph, const Matrix& f) {
  return truncation_loss(graph.normalized, f);
}

}  // namespace spectral_ncd
