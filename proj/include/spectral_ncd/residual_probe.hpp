#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spectral_ncd/linalg.hpp"
#include "spectral_ncd/spectral_engine.hpp"

namespace spectral_ncd {

/// One-hot label matrix Y (N_u x |Y_u|) over the unlabeled points.
struct LabelMatrix {
  Matrix y_matrix;
  std::vector<int> class_ids;  // column j holds class class_ids[j]
  std::vector<Index> labels;   // per-row column index

  static LabelMatrix from_labels(std::span<const int> labels);

  Index n_rows() const { return y_matrix.rows(); }
  Index n_classes() const { return y_matrix.cols(); }
  Vector column(Index j) const { return y_matrix.col(j); }
  bool balanced() const;
};

struct LeastSquares {
  double residual = 0.0;  // min_mu ‖y - U mu‖²
  Vector mu;
};

/// Least-squares residual of y against span(U) via the pseudoinverse.
LeastSquares residual(const Matrix& u, const Vector& y);

struct ProbeResult {
  double residual_total = 0.0;
  Vector residual_per_class;
  Matrix m_ls;                      // k x |Y_u|
  Index zero_one_error_ls = 0;      // upper-bound surrogate for the linear probing error
};

/// Linear probe on U*: joint least squares, per-class residuals and the
/// 0-1 error of the least-squares classifier (ties go to the lowest class).
ProbeResult probe(const SpectralEmbedding& embedding, const LabelMatrix& labels);

/// Row-wise argmax with ties broken toward the lowest index.
std::vector<Index> argmax_rows(const Matrix& scores);

/// Maximum-profit assignment of rows to columns (Hungarian method).
/// Returns, per row, the assigned column or -1 when the matrix has more rows
/// than columns and the row is left unmatched.
std::vector<Index> hungarian_max_assignment(const Matrix& profit);

struct KMeansResult {
  std::vector<Index> assignment;
  Matrix centers;
  double inertia = 0.0;
};

/// Lloyd's algorithm with `restarts` seeded random point initializations.
KMeansResult kmeans(const Matrix& points, Index n_clusters, std::uint64_t seed,
                    int restarts = 10, int max_iters = 100);

/// Accuracy of matched cluster/class pairs after optimal assignment.
double assignment_accuracy(std::span<const Index> clusters, std::span<const int> true_labels);

/// K-means followed by Hungarian matching; returns matched / N_u.
double cluster_accuracy(const Matrix& features, std::span<const int> true_labels, Index n_clusters,
                        std::uint64_t seed);

}  // namespace spectral_ncd
