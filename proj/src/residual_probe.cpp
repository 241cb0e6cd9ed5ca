#include "spectral_ncd/residual_probe.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "spectral_ncd/errors.hpp"

namespace spectral_ncd {

LabelMatrix LabelMatrix::from_labels(std::span<const int> labels) {
  LabelMatrix out;
  out.class_ids.assign(labels.begin(), labels.end());
  std::sort(out.class_ids.begin(), out.class_ids.end());
  out.class_ids.erase(std::unique(out.class_ids.begin(), out.class_ids.end()), out.class_ids.end());
  const Index n = static_cast<Index>(labels.size());
  out.y_matrix = Matrix::Zero(n, static_cast<Index>(out.class_ids.size()));
  out.labels.resize(labels.size());
  for (Index i = 0; i < n; ++i) {
    const auto col = std::lower_bound(out.class_ids.begin(), out.class_ids.end(),
                                      labels[static_cast<std::size_t>(i)]) -
                     out.class_ids.begin();
    out.y_matrix(i, col) = 1.0;
    out.labels[static_cast<std::size_t>(i)] = col;
  }
  return out;
}

bool LabelMatrix::balanced() const {
  if (n_classes() == 0) return true;
  const Vector counts = y_matrix.colwise().sum();
  return counts.maxCoeff() == counts.minCoeff();
}

LeastSquares residual(const Matrix& u, const Vector& y) {
  if (u.rows() != y.size()) {
    throw InvalidInput("residual: U has " + std::to_string(u.rows()) + " rows but y has " +
                       std::to_string(y.size()));
  }
  LeastSquares ls;
  if (u.cols() == 0) {
    ls.mu = Vector(0);
    ls.residual = y.squaredNorm();
    return ls;
  }
  ls.mu = pseudo_inverse(u) * y;
  ls.residual = (y - u * ls.mu).squaredNorm();
  return ls;
}

std::vector<Index> argmax_rows(const Matrix& scores) {
  std::vector<Index> out(static_cast<std::size_t>(scores.rows()), 0);
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

ProbeResult probe(const SpectralEmbedding& embedding, const LabelMatrix& labels) {
  const Matrix& u = embedding.u_top;
  if (u.rows() != labels.n_rows()) {
    throw InvalidInput("probe: embedding has " + std::to_string(u.rows()) +
                       " unlabeled rows but labels have " + std::to_string(labels.n_rows()));
  }
  ProbeResult r;
  r.m_ls = pseudo_inverse(u) * labels.y_matrix;
  r.residual_per_class.resize(labels.n_classes());
  for (Index j = 0; j < labels.n_classes(); ++j) {
    r.residual_per_class(j) = residual(u, labels.column(j)).residual;
  }
  r.residual_total = r.residual_per_class.sum();
  const auto predicted = argmax_rows(u * r.m_ls);
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] != labels.labels[i]) ++r.zero_one_error_ls;
  }
  return r;
}

std::vector<Index> hungarian_max_assignment(const Matrix& profit) {
  const Index rows = profit.rows(), cols = profit.cols();
  if (rows == 0) return {};
  const Index n = std::max(rows, cols);
  // Square cost matrix for the minimization form; padding costs zero.
  const double top = cols > 0 ? profit.maxCoeff() : 0.0;
  Matrix cost = Matrix::Zero(n, n);
  cost.topLeftCorner(rows, cols) = (top - profit.array()).matrix();

  // Shortest augmenting path formulation with potentials, 1-based internally.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<Index> p(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = p[static_cast<std::size_t>(j0)];
      double delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[sj];
        if (cur < minv[sj]) {
          minv[sj] = cur;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(p[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> assignment(static_cast<std::size_t>(rows), -1);
  for (Index j = 1; j <= n; ++j) {
    const Index i = p[static_cast<std::size_t>(j)];
    if (i >= 1 && i <= rows && j <= cols) assignment[static_cast<std::size_t>(i - 1)] = j - 1;
  }
  return assignment;
}

KMeansResult kmeans(const Matrix& points, Index n_clusters, std::uint64_t seed, int restarts,
                    int max_iters) {
  const Index n = points.rows();
  if (n == 0) throw InvalidInput("kmeans: empty input");
  if (n_clusters < 1) throw InvalidInput("kmeans: n_clusters must be at least 1");
  const Index kc = std::min(n_clusters, n);
  std::mt19937_64 rng(seed);

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  std::vector<Index> perm(static_cast<std::size_t>(n));
  for (int r = 0; r < restarts; ++r) {
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix centers(kc, points.cols());
    for (Index c = 0; c < kc; ++c) centers.row(c) = points.row(perm[static_cast<std::size_t>(c)]);

    std::vector<Index> assign(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iters; ++it) {
      bool changed = false;
      for (Index i = 0; i < n; ++i) {
        Index arg = 0;
        double dist = (points.row(i) - centers.row(0)).squaredNorm();
        for (Index c = 1; c < kc; ++c) {
          const double d = (points.row(i) - centers.row(c)).squaredNorm();
          if (d < dist) {
            dist = d;
            arg = c;
          }
        }
        if (assign[static_cast<std::size_t>(i)] != arg) {
          assign[static_cast<std::size_t>(i)] = arg;
          changed = true;
        }
      }
      if (!changed) break;
      Matrix sums = Matrix::Zero(kc, points.cols());
      std::vector<Index> counts(static_cast<std::size_t>(kc), 0);
      for (Index i = 0; i < n; ++i) {
        sums.row(assign[static_cast<std::size_t>(i)]) += points.row(i);
        ++counts[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
      }
      // Empty clusters keep their previous center.
      for (Index c = 0; c < kc; ++c) {
        if (counts[static_cast<std::size_t>(c)] > 0) {
          centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        }
      }
    }
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      inertia += (points.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
    }
    if (inertia < best.inertia) {
      best.inertia = inertia;
      best.assignment = assign;
      best.centers = centers;
    }
  }
  return best;
}

double assignment_accuracy(std::span<const Index> clusters, std::span<const int> true_labels) {
  if (clusters.size() != true_labels.size()) {
    throw InvalidInput("assignment_accuracy: cluster and label counts differ");
  }
  if (clusters.empty()) throw InvalidInput("assignment_accuracy: empty input");
  std::map<Index, Index> cluster_col;
  std::map<int, Index> class_col;
  for (Index c : clusters) cluster_col.emplace(c, 0);
  for (int y : true_labels) class_col.emplace(y, 0);
  Index next = 0;
  for (auto& [_, col] : cluster_col) col = next++;
  next = 0;
  for (auto& [_, col] : class_col) col = next++;

  Matrix counts = Matrix::Zero(static_cast<Index>(cluster_col.size()), static_cast<Index>(class_col.size()));
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    counts(cluster_col[clusters[i]], class_col[true_labels[i]]) += 1.0;
  }
  const auto match = hungarian_max_assignment(counts);
  double matched = 0.0;
  for (Index r = 0; r < counts.rows(); ++r) {
    const Index c = match[static_cast<std::size_t>(r)];
    if (c >= 0) matched += counts(r, c);
  }
  return matched / static_cast<double>(clusters.size());
}

double cluster_accuracy(const Matrix& features, std::span<const int> true_labels, Index n_clusters,
                        std::uint64_t seed) {
  if (features.rows() == 0) throw InvalidInput("cluster_accuracy: empty input");
  if (features.rows() != static_cast<Index>(true_labels.size())) {
    throw InvalidInput("cluster_accuracy: feature rows and labels differ in length");
  }
  const KMeansResult km = kmeans(features, n_clusters, seed);
  return assignment_accuracy(km.assignment, true_labels);
}

}  // namespace spectral_ncd
