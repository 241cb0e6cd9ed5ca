#include "doctest.h"

#include "oracles.hpp"
#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/nscl_objective.hpp"
#include "spectral_ncd/random_instances.hpp"
#include "spectral_ncd/spectral_engine.hpp"
#include "spectral_ncd/toy_lab.hpp"

using namespace spectral_ncd;

namespace {

// ‖Ȧ - FFᵀ‖² with every ingredient rebuilt from the brute-force weights.
double reference_offset(const PopulationSpec& s, const Matrix& f) {
  const Matrix w = oracle::brute_force_adjacency(s);
  const Vector deg = w.rowwise().sum();
  const Vector is = deg.cwiseSqrt().cwiseInverse();
  const Matrix a_dot = is.asDiagonal() * w * is.asDiagonal();
  const Matrix big_f = deg.cwiseSqrt().asDiagonal() * f;
  return oracle::entrywise_truncation(a_dot, big_f);
}

PopulationSpec toy_population() {
  const Matrix t = toy_matrix({1.0, 0.25, 0.2, 0.0}, 0.2);
  const Vector sums = t.rowwise().sum();
  PopulationSpec s;
  s.aug_prob = sums.cwiseInverse().asDiagonal() * t;
  for (Index i = 0; i < 5; ++i) s.natural_unlabeled.push_back(i);
  s.unlabeled_prior = sums.cwiseAbs2() / sums.squaredNorm();
  s.class_prior_labeled = Vector(0);
  return s;
}

}  // namespace

TEST_CASE("zero features give zero loss") {
  Rng rng(1);
  const PopulationSpec s = random_population(rng);
  const NsclBreakdown b = nscl_loss(s, FeatureMap(Matrix::Zero(s.n_points(), 2)));
  CHECK(b.l1 == 0.0);
  CHECK(b.l2 == 0.0);
  CHECK(b.l3 == 0.0);
  CHECK(b.l4 == 0.0);
  CHECK(b.l5 == 0.0);
  CHECK(b.total == 0.0);
  CHECK(nscl_gradient(s, FeatureMap(Matrix::Zero(s.n_points(), 2))).norm() == 0.0);
}

TEST_CASE("offset identity on random instances") {
  Rng rng(2);
  for (int trial = 0; trial < 150; ++trial) {
    const PopulationSpec s = random_population(rng);
    const Index k = std::uniform_int_distribution<Index>(1, 4)(rng);
    const Matrix f = random_matrix(rng, s.n_points(), k);
    const NsclBreakdown b = nscl_loss(s, FeatureMap(f));
    const double ref = reference_offset(s, f);
    CHECK(std::abs(b.total + b.equivalence_constant - ref) <= 1e-8 * std::max(1.0, std::abs(ref)));
    CHECK(b.l3 >= 0.0);
    CHECK(b.l4 >= 0.0);
    CHECK(b.l5 >= 0.0);
  }
}

TEST_CASE("alpha zero removes the labeled terms") {
  Rng rng(3);
  PopulationSpec s = random_population(rng);
  s.alpha = 0.0;
  const Matrix f = random_matrix(rng, s.n_points(), 2);
  const NsclBreakdown b = nscl_loss(s, FeatureMap(f));
  CHECK(b.total == doctest::Approx(-2.0 * s.beta * b.l2 + s.beta * s.beta * b.l5));
}

TEST_CASE("rotation invariance") {
  Rng rng(4);
  const PopulationSpec s = random_population(rng);
  const Matrix f = random_matrix(rng, s.n_points(), 3);
  const Matrix q = Eigen::HouseholderQR<Matrix>(random_matrix(rng, 3, 3)).householderQ();
  CHECK(nscl_loss(s, FeatureMap(f * q)).total == doctest::Approx(nscl_loss(s, FeatureMap(f)).total).epsilon(1e-12));
}

TEST_CASE("gradient matches central differences") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const PopulationSpec s = random_population(rng);
    const Matrix f = random_matrix(rng, s.n_points(), 2);
    const Matrix g = nscl_gradient(s, FeatureMap(f));
    auto loss = [&](const Matrix& x) { return nscl_loss(s, FeatureMap(x)).total; };
    const Matrix d = random_matrix(rng, f.rows(), f.cols());
    const double fd = oracle::directional(loss, f, d);
    const double an = (g.array() * d.array()).sum();
    CHECK(std::abs(fd - an) <= 1e-4 * std::max(1e-3, std::abs(an)));
    for (Index i = 0; i < f.rows(); ++i) {
      for (Index j = 0; j < f.cols(); ++j) {
        Matrix e = Matrix::Zero(f.rows(), f.cols());
        e(i, j) = 1.0;
        const double fd_ij = oracle::directional(loss, f, e);
        CHECK(std::abs(fd_ij - g(i, j)) <= 1e-4 * std::max(1e-3, std::abs(g(i, j))));
      }
    }
  }
}

TEST_CASE("dimension mismatch is rejected") {
  Rng rng(6);
  const PopulationSpec s = random_population(rng);
  CHECK_THROWS_AS(nscl_loss(s, FeatureMap(Matrix::Zero(s.n_points() + 1, 2))), InvalidInput);
  CHECK_THROWS_AS(nscl_gradient(s, FeatureMap(Matrix::Zero(s.n_points() - 1, 2))), InvalidInput);
}

TEST_CASE("minimizer recovers the spectral truncation") {
  SUBCASE("toy graph") {
    const PopulationSpec s = toy_population();
    MinimizeOptions opt;
    opt.k = 2;
    const MinimizeResult r = minimize_nscl(s, opt);
    CHECK(r.certificate < 1e-3);
    const WeightedGraph g = build_adjacency(s);
    const Matrix fs = r.f.scaled(g.degrees);
    CHECK((fs * fs.transpose() - oracle::truncation(g.normalized, 2)).norm() < 1e-3 * oracle::truncation(g.normalized, 2).norm());
  }
  SUBCASE("rank-k target is matched exactly") {
    PopulationSpec s;
    s.aug_prob = Matrix::Zero(2, 4);
    s.aug_prob.row(0) << 0.3, 0.7, 0.0, 0.0;
    s.aug_prob.row(1) << 0.0, 0.0, 0.6, 0.4;
    s.natural_unlabeled = {0, 1};
    s.unlabeled_prior = Vector::Constant(2, 0.5);
    s.class_prior_labeled = Vector(0);
    MinimizeOptions opt;
    opt.k = 2;
    const MinimizeResult r = minimize_nscl(s, opt);
    const WeightedGraph g = build_adjacency(s);
    CHECK(truncation_loss(g, r.f.scaled(g.degrees)) < 1e-6);
  }
  SUBCASE("seeds agree and the loss cannot beat Eckart-Young") {
    Rng rng(7);
    int tested = 0;
    while (tested < 5) {
      const PopulationSpec s = random_population(rng);
      const WeightedGraph g = build_adjacency(s);
      const SpectralEmbedding e = decompose(g, 2);
      if (e.eigengap < 0.05) continue;
      ++tested;
      MinimizeOptions a, b;
      a.k = b.k = 2;
      a.seed = 1;
      b.seed = 99;
      const MinimizeResult ra = minimize_nscl(s, a), rb = minimize_nscl(s, b);
      CHECK(ra.certificate < 1e-3);
      CHECK(rb.certificate < 1e-3);
      const Matrix fa = ra.f.scaled(g.degrees), fb = rb.f.scaled(g.degrees);
      CHECK((fa * fa.transpose() - fb * fb.transpose()).norm() < 1e-3 * e.gram().norm());
      const double floor = e.singular_values.tail(e.size() - 2).squaredNorm() - ra.breakdown.equivalence_constant;
      CHECK(ra.breakdown.total >= floor - 1e-6);
      CHECK(ra.grad_norm < 1e-6);
    }
  }
}

TEST_CASE("minimizer argument checks") {
  Rng rng(8);
  const PopulationSpec s = random_population(rng);
  MinimizeOptions opt;
  opt.k = 0;
  CHECK_THROWS_AS(minimize_nscl(s, opt), InvalidInput);
  opt.k = 1;
  opt.lr = 0.0;
  CHECK_THROWS_AS(minimize_nscl(s, opt), InvalidInput);
}

TEST_CASE("iteration cap reports non-convergence") {
  Rng rng(9);
  const PopulationSpec s = random_population(rng);
  MinimizeOptions opt;
  opt.max_iters = 2;
  const MinimizeResult r = minimize_nscl(s, opt);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 2);
}
