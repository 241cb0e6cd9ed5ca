#pragma once

#include <vector>

#include "spectral_ncd/linalg.hpp"

namespace spectral_ncd {

/// A labeled natural sample: row of `aug_prob` plus its known class.
struct LabeledNatural {
  Index row = 0;
  int class_id = 0;
};

/// Finite population: natural samples, their augmentation distributions
/// T(x | x̄) over the augmented points, class priors and mixing weights.
///
/// Augmented points are the columns of `aug_prob`; the first
/// `n_labeled_points` columns form the labeled part of the graph.
struct PopulationSpec {
  std::vector<LabeledNatural> natural_labeled;
  std::vector<Index> natural_unlabeled;
  Matrix aug_prob;              // naturals x augmented points
  Vector class_prior_labeled;   // aligned with natural_labeled, sums to 1 per class
  Vector unlabeled_prior;       // aligned with natural_unlabeled, sums to 1
  Index n_labeled_points = 0;
  double alpha = 1.0;
  double beta = 1.0;

  Index n_points() const { return aug_prob.cols(); }
  Index n_unlabeled_points() const { return n_points() - n_labeled_points; }

  /// Distinct labeled class ids, ascending.
  std::vector<int> labeled_classes() const;

  /// Throws InvalidInput describing the first violated invariant.
  void validate() const;

  /// Per-class mixtures m_i = E_{x̄ ~ P_{l_i}} T(· | x̄), one column per class
  /// in `labeled_classes()` order.
  Matrix class_mixtures() const;

  /// E_{x̄ ~ P_u} T(· | x̄).
  Vector unlabeled_mixture() const;
};

/// Adjacency A, degrees and D^{-1/2} A D^{-1/2} of the augmentation graph.
struct WeightedGraph {
  Matrix adjacency;
  Vector degrees;
  Matrix normalized;
  Index n_labeled = 0;
  Index n_unlabeled = 0;

  Index size() const { return adjacency.rows(); }

  /// Normalizes an arbitrary symmetric nonnegative adjacency matrix whose
  /// first `n_labeled` vertices are the labeled part.
  static WeightedGraph from_adjacency(Matrix adjacency, Index n_labeled);
};

/// Block-averaged approximation Ā = P Ȧ Pᵀ: labeled rows and columns are
/// replaced by their means.
struct ApproxGraph {
  Matrix a_bar;
  double eta_l = 0.0;  // mean of the labeled-labeled block
  Vector eta_u;        // per-unlabeled-row mean over labeled columns
  Matrix a_uu;
  Matrix a_ul;         // unaveraged labeled-unlabeled block of the source
  Matrix source;       // the matrix Ā was built from (Ȧ)
  Index n_labeled = 0;

  Index size() const { return a_bar.rows(); }
  Index n_unlabeled() const { return a_uu.rows(); }

  /// Assembles Ā directly from its blocks. The source is taken to be Ā itself.
  static ApproxGraph from_blocks(Index n_labeled, double eta_l, const Vector& eta_u,
                                 const Matrix& a_uu);
};

/// Degrees below this are rejected as zero.
inline constexpr double kMinDegree = 1e-12;

/// The weights w_{xx'} alone; validates the spec but allows zero degrees.
Matrix raw_adjacency(const PopulationSpec& spec);

WeightedGraph build_adjacency(const PopulationSpec& spec);

ApproxGraph build_approx(const WeightedGraph& graph);
ApproxGraph build_approx(const Matrix& normalized, Index n_labeled);

}  // namespace spectral_ncd
