#include "spectral_ncd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spectral_ncd {

Matrix pseudo_inverse(const Matrix& m, double cutoff) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  Vector inv = Vector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) >= cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Matrix symmetric_pseudo_inverse(const Matrix& m, double cutoff) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Vector& d = es.eigenvalues();
  Vector inv = Vector::Zero(d.size());
  for (Index i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) >= cutoff) inv(i) = 1.0 / d(i);
  }
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

SymmetricEigen symmetric_eigen_descending(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  const Index n = m.rows();
  // SelfAdjointEigenSolver returns ascending order; reverse it.
  SymmetricEigen out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = es.eigenvalues()(n - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double asymmetry(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

void canonicalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double peak = v.cwiseAbs().maxCoeff();
  // Entries within a few ulps of the peak count as ties; the first one decides.
  const double tie = peak * 1e-12;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak - tie) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace spectral_ncd
