#pragma once

#include <cstdint>
#include <random>

#include "spectral_ncd/linalg.hpp"
#include "spectral_ncd/population_graph.hpp"

namespace spectral_ncd {

using Rng = std::mt19937_64;

/// Random valid population with every augmented point reachable.
/// Total point count lies in [3, max_points].
PopulationSpec random_population(Rng& rng, Index max_points = 10);

/// Random symmetric nonnegative adjacency with positive degrees, N in [n_min, n_max].
Matrix random_adjacency(Rng& rng, Index n_min, Index n_max);

/// Random binary vector with at least one 1 and one 0 when n >= 2.
Vector random_binary(Rng& rng, Index n);

/// Random symmetric PSD matrix (Gram of a random factor plus a diagonal shift).
Matrix random_psd(Rng& rng, Index n, double diag_shift = 0.5);

/// Ā assembled from a random PSD A_uu, positive η_u and η_l.
ApproxGraph random_psd_block_approx(Rng& rng, Index n_labeled, Index n_unlabeled);

Matrix random_matrix(Rng& rng, Index rows, Index cols, double lo = -1.0, double hi = 1.0);

}  // namespace spectral_ncd
