#pragma once
// Independent reference computations used only by the tests. None of these
// call into the library's numerical routines.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "spectral_ncd/population_graph.hpp"

namespace oracle {

using spectral_ncd::Index;
using spectral_ncd::Matrix;
using spectral_ncd::Vector;

struct Eig {
  Vector values;   // descending
  Matrix vectors;
};

// Cyclic Jacobi rotations for a symmetric matrix.
inline Eig jacobi(Matrix a) {
  const Index n = a.rows();
  Matrix v = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
  Eig out{Vector(n), Matrix(n, n)};
  for (Index i = 0; i < n; ++i) {
    out.values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    out.vectors.col(i) = v.col(order[static_cast<std::size_t>(i)]);
  }
  return out;
}

// Rank-k truncation from the Jacobi spectrum, ordered by |lambda|.
inline Matrix truncation(const Matrix& a, Index k) {
  const Eig e = jacobi(a);
  std::vector<Index> order(static_cast<std::size_t>(a.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return std::abs(e.values(i)) > std::abs(e.values(j)); });
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (Index i = 0; i < k; ++i) {
    const Index c = order[static_cast<std::size_t>(i)];
    out += e.values(c) * e.vectors.col(c) * e.vectors.col(c).transpose();
  }
  return out;
}

// Projector onto span of the columns, via Gram-Schmidt.
inline Matrix projector(const Matrix& cols) {
  Matrix q = cols;
  Index r = 0;
  for (Index j = 0; j < cols.cols(); ++j) {
    Vector v = cols.col(j);
    for (int pass = 0; pass < 2; ++pass)
      for (Index i = 0; i < r; ++i) v -= q.col(i).dot(v) * q.col(i);
    if (v.norm() > 1e-12) q.col(r++) = v.normalized();
  }
  return q.leftCols(r) * q.leftCols(r).transpose();
}

// Residual of y against span(U) through Gram-Schmidt.
inline double ls_residual(const Matrix& u, const Vector& y) {
  return (y - projector(u) * y).squaredNorm();
}

// Pair weights expanded term by term over natural samples.
inline Matrix brute_force_adjacency(const spectral_ncd::PopulationSpec& s) {
  const Index n = s.aug_prob.cols();
  Matrix a = Matrix::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    for (Index xp = 0; xp < n; ++xp) {
      double lab = 0.0;
      for (std::size_t i = 0; i < s.natural_labeled.size(); ++i) {
        for (std::size_t j = 0; j < s.natural_labeled.size(); ++j) {
          if (s.natural_labeled[i].class_id != s.natural_labeled[j].class_id) continue;
          lab += s.class_prior_labeled(static_cast<Index>(i)) * s.class_prior_labeled(static_cast<Index>(j)) *
                 s.aug_prob(s.natural_labeled[i].row, x) * s.aug_prob(s.natural_labeled[j].row, xp);
        }
      }
      double unl = 0.0;
      for (std::size_t u = 0; u < s.natural_unlabeled.size(); ++u) {
        const Index r = s.natural_unlabeled[u];
        unl += s.unlabeled_prior(static_cast<Index>(u)) * s.aug_prob(r, x) * s.aug_prob(r, xp);
      }
      a(x, xp) = s.alpha * lab + s.beta * unl;
    }
  }
  return a;
}

// Maximum matched count over all injective cluster -> class maps.
inline double brute_force_assignment(const Matrix& counts) {
  const Index r = counts.rows(), c = counts.cols();
  const Index n = std::max(r, c);
  Matrix sq = Matrix::Zero(n, n);
  sq.topLeftCorner(r, c) = counts;
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  double best = 0.0;
  do {
    double v = 0.0;
    for (Index i = 0; i < n; ++i) v += sq(i, perm[static_cast<std::size_t>(i)]);
    best = std::max(best, v);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// min over zeta of ‖Bᵀzeta + c‖², solved by a QR least-squares (no SVD).
inline double min_over_zeta(const Matrix& b, const Vector& c) {
  if (b.rows() == 0) return c.squaredNorm();
  const Matrix bt = b.transpose();
  const Vector zeta = bt.colPivHouseholderQr().solve(-c);
  return (bt * zeta + c).squaredNorm();
}

// Central finite difference of a scalar function along a direction.
template <class F>
double directional(F&& f, const Matrix& x, const Matrix& d, double h = 1e-5) {
  return (f(x + h * d) - f(x - h * d)) / (2.0 * h);
}

// ‖Ȧ - FFᵀ‖²_F expanded entrywise as in the factorization argument.
inline double entrywise_truncation(const Matrix& a_dot, const Matrix& f) {
  double s = 0.0;
  for (Index i = 0; i < a_dot.rows(); ++i)
    for (Index j = 0; j < a_dot.cols(); ++j) {
      const double d = a_dot(i, j) - f.row(i).dot(f.row(j));
      s += d * d;
    }
  return s;
}

}  // namespace oracle
