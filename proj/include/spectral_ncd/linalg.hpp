#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace spectral_ncd {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below this are treated as zero by every pseudoinverse.
inline constexpr double kPinvCutoff = 1e-10;

/// Moore-Penrose pseudoinverse via SVD; singular values < cutoff are dropped.
Matrix pseudo_inverse(const Matrix& m, double cutoff = kPinvCutoff);

/// Pseudoinverse of a symmetric matrix via its eigendecomposition.
Matrix symmetric_pseudo_inverse(const Matrix& m, double cutoff = kPinvCutoff);

/// Largest singular value.
double spectral_norm(const Matrix& m);

/// Symmetric eigendecomposition with eigenvalues sorted in descending order.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen_descending(const Matrix& m);

/// Largest |a_ij - a_ji|.
double asymmetry(const Matrix& m);

/// Flips the sign of `v` so that its first entry of largest magnitude is positive.
void canonicalize_sign(Eigen::Ref<Vector> v);

}  // namespace spectral_ncd
