#pragma once

#include "spectral_ncd/linalg.hpp"
#include "spectral_ncd/population_graph.hpp"

namespace spectral_ncd {

/// Eigengaps below this mark the top-k subspace as not unique.
inline constexpr double kDegenerateGap = 1e-10;

/// Full spectral decomposition of a symmetric matrix ordered by singular
/// value (|eigenvalue|, descending), split at k and at the labeled rows.
///
/// Every eigenvector has its first entry of largest magnitude positive.
struct SpectralEmbedding {
  Vector singular_values;  // sigma_1 >= ... >= sigma_N
  Vector eigenvalues;      // signed eigenvalues in the same order
  Matrix v_top;            // V*, N x k
  Matrix v_rest;           // V♭, N x (N - k)
  Matrix l_top, u_top;     // L*, U*
  Matrix l_rest, u_rest;   // L♭, U♭
  Matrix f_star;           // V* sqrt(Sigma_k)
  Index k = 0;
  Index n_labeled = 0;
  double eigengap = 0.0;   // sigma_k - sigma_{k+1}, with sigma_{N+1} = 0
  bool degenerate_gap = false;

  Index size() const { return v_top.rows(); }
  Index n_unlabeled() const { return size() - n_labeled; }

  /// [V* V♭].
  Matrix vectors() const;

  /// F* F*ᵀ.
  Matrix gram() const { return f_star * f_star.transpose(); }
};

/// Decomposes an arbitrary symmetric matrix whose first `n_labeled` rows are
/// the labeled part. Used both for Ȧ and for unnormalized matrices.
SpectralEmbedding decompose(const Matrix& symmetric, Index n_labeled, Index k);

/// Decomposes the normalized adjacency Ȧ of `graph`.
SpectralEmbedding decompose(const WeightedGraph& graph, Index k);

/// ‖Ȧ - F Fᵀ‖²_F.
double truncation_loss(const Matrix& normalized, const Matrix& f);
double truncation_loss(const WeightedGraph& graph, const Matrix& f);

}  // namespace spectral_ncd
