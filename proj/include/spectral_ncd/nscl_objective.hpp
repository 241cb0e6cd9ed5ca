#pragma once

#include <cstdint>

#include "spectral_ncd/linalg.hpp"
#include "spectral_ncd/population_graph.hpp"

namespace spectral_ncd {

/// Feature map f over the augmented points: row x holds f(x).
struct FeatureMap {
  Matrix values;

  FeatureMap() = default;
  explicit FeatureMap(Matrix v);

  Index k() const { return values.cols(); }
  Index size() const { return values.rows(); }

  /// F with rows sqrt(w_x) f(x).
  Matrix scaled(const Vector& degrees) const;
};

/// The five expectation terms of the NCD spectral contrastive loss.
struct NsclBreakdown {
  double l1 = 0.0;  // same-class labeled positives
  double l2 = 0.0;  // same-image unlabeled positives
  double l3 = 0.0;  // labeled-labeled negatives
  double l4 = 0.0;  // labeled-unlabeled negatives
  double l5 = 0.0;  // unlabeled-unlabeled negatives
  double total = 0.0;
  /// sum_{x,x'} w_{xx'}^2 / (w_x w_x'): total + this = ‖Ȧ - FFᵀ‖²_F.
  double equivalence_constant = 0.0;
};

NsclBreakdown nscl_loss(const PopulationSpec& spec, const FeatureMap& f);

/// d total / d f, same shape as f.
Matrix nscl_gradient(const PopulationSpec& spec, const FeatureMap& f);

struct MinimizeOptions {
  Index k = 2;
  std::uint64_t seed = 0;
  int max_iters = 5000;
  double lr = 0.1;            // first trial step of the line search
  double grad_tol = 1e-11;    // stop once ‖grad‖_F falls below this
  double armijo = 1e-4;
};

struct MinimizeResult {
  FeatureMap f;
  NsclBreakdown breakdown;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;
  /// Relative Frobenius distance between F̂F̂ᵀ and the rank-k truncation F*F*ᵀ.
  double certificate = 0.0;
};

/// Full-batch gradient descent with backtracking line search on the loss.
MinimizeResult minimize_nscl(const PopulationSpec& spec, const MinimizeOptions& options);

/// ‖F̂F̂ᵀ - F*F*ᵀ‖_F / ‖F*F*ᵀ‖_F for F̂_x = sqrt(w_x) f(x).
double equivalence_certificate(const PopulationSpec& spec, const FeatureMap& f);

}  // namespace spectral_ncd
