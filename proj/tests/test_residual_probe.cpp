#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/random_instances.hpp"
#include "spectral_ncd/residual_probe.hpp"
#include "spectral_ncd/spectral_engine.hpp"
#include "spectral_ncd/toy_lab.hpp"

using namespace spectral_ncd;

namespace {

std::vector<int> random_labels(Rng& rng, Index n, int n_classes) {
  std::vector<int> out(static_cast<std::size_t>(n));
  std::uniform_int_distribution<int> pick(0, n_classes - 1);
  for (auto& v : out) v = pick(rng);
  return out;
}

}  // namespace

TEST_CASE("residual examples") {
  Rng rng(1);
  const Matrix u = random_matrix(rng, 6, 3);
  CHECK(residual(u, u.col(0)).residual < 1e-20);

  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(rng, 6, 6)).householderQ();
  const Vector y = q.col(4) * 2.5;
  CHECK(residual(q.leftCols(3), y).residual == doctest::Approx(6.25));

  CHECK(residual(Matrix(4, 0), Vector::Ones(4)).residual == doctest::Approx(4.0));
  CHECK_THROWS_AS(residual(u, Vector::Ones(5)), InvalidInput);

  for (int trial = 0; trial < 100; ++trial) {
    const Matrix a = random_matrix(rng, 7, 3);
    const Vector b = random_matrix(rng, 7, 1).col(0);
    CHECK(residual(a, b).residual == doctest::Approx(oracle::ls_residual(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("toy residuals of the first two cases") {
  const ToyParams p{1.0, 0.25, 0.2, 0.0};
  const ToyScenario c1 = build_toy(ToyCase::case1, p);
  const ToyScenario c2 = build_toy(ToyCase::case2, p);
  const SpectralEmbedding e1 = decompose(c1.matrix, 1, 2);
  const SpectralEmbedding e2 = decompose(c2.matrix, 1, 2);
  CHECK(residual(e1.u_top, c1.y).residual < 1e-6);
  CHECK(std::abs(residual(e2.u_top, c2.y).residual - 1.0) < 1e-6);

  const std::vector<int> colors{0, 0, 1, 1};
  const ProbeResult pr = probe(e1, LabelMatrix::from_labels(colors));
  CHECK(pr.residual_per_class(0) < 1e-6);
  CHECK(pr.zero_one_error_ls == 0);
}

TEST_CASE("label matrix") {
  const std::vector<int> labels{5, 2, 5, 2, 9};
  const LabelMatrix y = LabelMatrix::from_labels(labels);
  CHECK(y.n_rows() == 5);
  CHECK(y.n_classes() == 3);
  CHECK(y.class_ids == std::vector<int>{2, 5, 9});
  CHECK((y.y_matrix.rowwise().sum().array() == 1.0).all());
  CHECK_FALSE(y.balanced());
  const std::vector<int> even{0, 1, 1, 0};
  CHECK(LabelMatrix::from_labels(even).balanced());
}

TEST_CASE("one class with the constant direction in span") {
  Matrix a = Matrix::Constant(4, 4, 0.25);
  a(0, 0) += 0.1;
  const SpectralEmbedding e = decompose(a, 1, 1);
  const std::vector<int> one{3, 3, 3};
  const ProbeResult r = probe(e, LabelMatrix::from_labels(one));
  CHECK(r.residual_total < 1e-10);
  CHECK(r.zero_one_error_ls == 0);
}

TEST_CASE("probe invariants on random instances") {
  Rng rng(2);
  int violations = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const Matrix a = random_adjacency(rng, 4, 10);
    const Index nl = std::uniform_int_distribution<Index>(1, a.rows() - 3)(rng);
    const WeightedGraph g = WeightedGraph::from_adjacency(a, nl);
    const Index k = std::uniform_int_distribution<Index>(1, a.rows() - 1)(rng);
    const SpectralEmbedding e = decompose(g, k);
    const auto labels = random_labels(rng, g.n_unlabeled, 2 + trial % 2);
    const ProbeResult r = probe(e, LabelMatrix::from_labels(labels));
    CHECK(r.residual_total >= 0.0);
    CHECK(std::abs(r.residual_total - r.residual_per_class.sum()) < 1e-12);
    if (r.residual_total < 0.5 * static_cast<double>(r.zero_one_error_ls)) ++violations;

    if (k + 1 <= a.rows()) {
      const ProbeResult wider = probe(decompose(g, k + 1), LabelMatrix::from_labels(labels));
      CHECK(wider.residual_total <= r.residual_total + 1e-10);
    }
  }
  CHECK(violations == 0);
}

TEST_CASE("full rank embedding leaves no residual") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_adjacency(rng, 5, 8);
    const WeightedGraph g = WeightedGraph::from_adjacency(a, 2);
    const SpectralEmbedding e = decompose(g, a.rows());
    const auto labels = random_labels(rng, g.n_unlabeled, 3);
    CHECK(probe(e, LabelMatrix::from_labels(labels)).residual_total < 1e-10);
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  Matrix s(2, 3);
  s << 1.0, 1.0, 0.5,
       0.0, 2.0, 2.0;
  CHECK(argmax_rows(s) == std::vector<Index>{0, 1});
}

TEST_CASE("hungarian matches brute force") {
  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const Index r = std::uniform_int_distribution<Index>(1, 5)(rng);
    const Index c = std::uniform_int_distribution<Index>(1, 5)(rng);
    Matrix counts(r, c);
    for (Index i = 0; i < r; ++i)
      for (Index j = 0; j < c; ++j) counts(i, j) = static_cast<double>(std::uniform_int_distribution<int>(0, 6)(rng));
    const auto match = hungarian_max_assignment(counts);
    double total = 0.0;
    std::vector<Index> used;
    for (Index i = 0; i < r; ++i) {
      const Index j = match[static_cast<std::size_t>(i)];
      if (j < 0) continue;
      CHECK(std::find(used.begin(), used.end(), j) == used.end());
      used.push_back(j);
      total += counts(i, j);
    }
    CHECK(static_cast<Index>(used.size()) == std::min(r, c));
    CHECK(total == oracle::brute_force_assignment(counts));
  }
}

TEST_CASE("cluster accuracy") {
  SUBCASE("one-hot features") {
    const std::vector<int> labels{0, 1, 2, 1, 0, 2, 2};
    Matrix f = Matrix::Zero(7, 3);
    for (Index i = 0; i < 7; ++i) f(i, labels[static_cast<std::size_t>(i)]) = 1.0;
    CHECK(cluster_accuracy(f, labels, 3, 0) == 1.0);
  }
  SUBCASE("identical features") {
    const std::vector<int> labels{0, 1, 0, 1, 0, 1};
    CHECK(cluster_accuracy(Matrix::Ones(6, 2), labels, 2, 0) == doctest::Approx(0.5));
  }
  SUBCASE("random points agree with brute force") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix f = random_matrix(rng, 10, 2);
      const auto labels = random_labels(rng, 10, 2);
      const KMeansResult km = kmeans(f, 2, 7);
      Matrix counts = Matrix::Zero(2, 2);
      for (std::size_t i = 0; i < labels.size(); ++i)
        counts(km.assignment[i], labels[i]) += 1.0;
      CHECK(assignment_accuracy(km.assignment, labels) ==
            doctest::Approx(oracle::brute_force_assignment(counts) / 10.0));
    }
  }
  SUBCASE("empty input") {
    CHECK_THROWS_AS(cluster_accuracy(Matrix(0, 2), std::vector<int>{}, 2, 0), InvalidInput);
  }
}

TEST_CASE("kmeans is seed deterministic") {
  Rng rng(6);
  const Matrix f = random_matrix(rng, 20, 3);
  CHECK(kmeans(f, 3, 11).assignment == kmeans(f, 3, 11).assignment);
}
