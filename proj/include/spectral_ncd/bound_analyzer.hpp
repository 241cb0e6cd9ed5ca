#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spectral_ncd/linalg.hpp"
#include "spectral_ncd/population_graph.hpp"
#include "spectral_ncd/spectral_engine.hpp"

namespace spectral_ncd {

enum class Verdict { holds, fails, ill_posed, not_applicable };

std::string_view to_string(Verdict v);

/// Ignorance space, extra knowledge and the projection bound on R(U*, y).
struct KnowledgeDecomposition {
  Vector ignorance_space;     // U♭ᵀy
  double ignorance_degree = 0.0;
  Matrix extra_knowledge;     // L♭
  Matrix projector_l_rest;    // L♭ᵀ(L♭L♭ᵀ)†L♭
  double theorem4_bound = 0.0;
  double residual = 0.0;      // R(U*, y), for the caller's convenience
};

/// Throws std::logic_error if the computed residual exceeds the bound.
KnowledgeDecomposition theorem4_analysis(const SpectralEmbedding& embedding, const Vector& y);

struct ConditionCheck {
  Verdict verdict = Verdict::not_applicable;
  double feasibility_residual = 0.0;  // min_w sum_i (c_i - <w, l_i>)²
  double residual = 0.0;              // R(U*, y)
  Vector omega;                       // least-squares w
  /// Indices (0-based, into the full spectrum) whose eigenvalue coincides
  /// with one of A_uu; their coefficient falls back to u_iᵀy.
  std::vector<Index> coincident;
};

/// Solvability of <yᵀ(σ_i I - A_uu)†A_ul, l_i> = <w, l_i> for all i > k.
ConditionCheck theorem4_condition(const SpectralEmbedding& embedding, const Matrix& normalized,
                                  const Vector& y);
ConditionCheck theorem4_condition(const SpectralEmbedding& embedding, const WeightedGraph& graph,
                                  const Vector& y);

struct CoverageReport {
  std::vector<std::string> warnings;
  bool a_uu_psd = true;
  Vector l_frak_rest;             // L̄♭ᵀ1
  double kappa = 0.0;
  bool kappa_undefined = false;   // one of the two vectors vanishes
  double ignorance_degree = 0.0;  // ‖Ū♭ᵀy‖ / ‖y‖
  double residual_bar = 0.0;      // R(Ū*, y)
  double exact_identity_rhs = 0.0;  // (1 - κ²)‖Ū♭ᵀy‖²
  std::vector<Index> index_set;   // 0-based spectrum indices where (𝔩̄♭)_i ≠ 0
  Vector omega;                   // aligned with index_set
  Vector sigma_bar;               // signed eigenvalues of Ā, spectrum order
  Vector d;                       // eigenvalues of A_uu, descending
  Matrix q;                       // eigenvectors of A_uu
  Vector y_tilde, eta_tilde;      // yᵀq_j, η_uᵀq_j
  std::optional<double> kappa_lower_bound;
  std::vector<Index> excluded_pairs;  // j with |η̃_j| ≈ 0
  std::optional<double> eigengap_term;  // ‖Ȧ - Ā‖₂ / (σ_k - σ_{k+1}) of Ȧ
  double perturbation = 0.0;          // ‖Ȧ - Ā‖₂
  Index theta = 0;
  std::optional<double> mean_unlabeled_deficiency;  // mean over the index set of 1 - ‖ū_i‖²
};

CoverageReport coverage_analysis(const ApproxGraph& approx, Index k, const Vector& y);

enum class ColumnKind { identical_rows, orthogonal_to_ones, unstructured };

struct LbarStructure {
  bool a_uu_psd = true;
  bool assumption_violated = false;
  bool holds = false;
  Index theta = 0;
  Index zero_columns = 0;       // columns of Ā's spectrum with σ̄ ≈ 0
  double top_row_spread = 0.0;  // max over L̄* columns of (max - min)
  double rest_row_spread = 0.0; // same over the identical-row block of L̄♭
  double trailing_dot = 0.0;    // max |1ᵀ l̄_i| over the trailing block
  std::vector<ColumnKind> rest_kinds;
};

LbarStructure lbar_structure_check(const ApproxGraph& approx, Index k);

struct ApproxErrorBound {
  double lhs = 0.0;                 // R(U*, y)
  std::optional<double> rhs;        // R(Ū*, y) + 2‖Ȧ-Ā‖₂/(σ_k-σ_{k+1})‖y‖²
  std::optional<double> ratio;      // lhs / rhs
  bool gap_ok = false;              // ‖Ȧ-Ā‖₂ < (σ_k-σ_{k+1})/2
  double perturbation = 0.0;
  double eigengap = 0.0;
  std::vector<std::string> warnings;
};

ApproxErrorBound approx_error_bound(const Matrix& normalized, const ApproxGraph& approx, Index k,
                                    const Vector& y);
ApproxErrorBound approx_error_bound(const WeightedGraph& graph, const ApproxGraph& approx, Index k,
                                    const Vector& y);

struct CosineMinimum {
  double min_value = 0.0;
  Vector argmin;                            // unit-norm minimizer
  double closed_form = 0.0;                 // min_{i<j} 2√(ω_iω_j)/(ω_i+ω_j)
  double sqrt_denominator_form = 0.0;       // min_{i<j} 2√(ω_iω_j)/(√ω_i+√ω_j)
  double closed_form_gap = 0.0;             // |min_value - closed_form|
  double sqrt_denominator_gap = 0.0;        // |min_value - sqrt_denominator_form|
};

/// g(l) = lᵀΩl / (‖Ωl‖‖l‖)
double cosine_functional(const Vector& omega, const Vector& l);

/// Multi-start projected gradient over p = l² on the simplex.
CosineMinimum cosine_functional_min(const Vector& omega, std::uint64_t seed = 0, int starts = 50);

struct OmegaRatioRow {
  Index i = 0, j = 0;   // 0-based spectrum indices
  double omega_ratio = 0.0;
  std::optional<double> r_ratio;
};

/// Exact ω_i/ω_j next to (ỹ/η̃)_i / (ỹ/η̃)_j, pairing each σ̄_i with its nearest d.
std::vector<OmegaRatioRow> omega_ratio_diagnostics(const ApproxGraph& approx, Index k, const Vector& y);

/// Θ: singular values of A_uu - η_uη_uᵀ/η_l below 1e-9‖A_uu‖₂.
Index null_rank_theta(const ApproxGraph& approx);

}  // namespace spectral_ncd
