#include "spectral_ncd/nscl_objective.hpp"

#include <cmath>
#include <random>

#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/spectral_engine.hpp"

namespace spectral_ncd {
namespace {

// Finite-population quantities every term is built from.
struct Population {
  Matrix class_mix;   // columns m_i
  Matrix unlabeled;   // columns T(.|x̄_u)
  Vector prior_u;     // P_u weights, aligned with `unlabeled`
  Vector s;           // sum_i m_i
  Vector mu;          // E_{x̄_u} T(.|x̄_u)
  double alpha = 0.0;
  double beta = 0.0;
  double constant = 0.0;

  explicit Population(const PopulationSpec& spec) : alpha(spec.alpha), beta(spec.beta) {
    const Matrix w = raw_adjacency(spec);  // validates
    class_mix = spec.class_mixtures();
    const Index nu = static_cast<Index>(spec.natural_unlabeled.size());
    unlabeled.resize(spec.n_points(), nu);
    for (Index j = 0; j < nu; ++j) {
      unlabeled.col(j) = spec.aug_prob.row(spec.natural_unlabeled[static_cast<std::size_t>(j)]).transpose();
    }
    prior_u = spec.unlabeled_prior;
    s = class_mix.rowwise().sum();
    mu = spec.unlabeled_mixture();
    // Vertices of zero degree carry no weight and drop out of the sum.
    const Vector deg = w.rowwise().sum();
    for (Index j = 0; j < w.cols(); ++j) {
      for (Index i = 0; i < w.rows(); ++i) {
        if (deg(i) > 0.0 && deg(j) > 0.0) constant += w(i, j) * w(i, j) / (deg(i) * deg(j));
      }
    }
  }

  void check(const FeatureMap& f) const {
    if (f.size() != s.size()) {
      throw InvalidInput("feature map has " + std::to_string(f.size()) +
                         " rows, expected one per augmented point (" + std::to_string(s.size()) + ")");
    }
    if (!f.values.allFinite()) throw InvalidInput("feature map has non-finite entries");
  }

  NsclBreakdown loss(const Matrix& f) const {
    NsclBreakdown b;
    b.l1 = (f.transpose() * class_mix).squaredNorm();
    const Matrix proj_u = f.transpose() * unlabeled;
    for (Index j = 0; j < proj_u.cols(); ++j) b.l2 += prior_u(j) * proj_u.col(j).squaredNorm();
    const Matrix h = (f * f.transpose()).array().square().matrix();
    const Vector hs = h * s;
    b.l3 = s.dot(hs);
    b.l4 = mu.dot(hs);
    b.l5 = mu.dot(h * mu);
    b.total = -2.0 * alpha * b.l1 - 2.0 * beta * b.l2 + alpha * alpha * b.l3 +
              2.0 * alpha * beta * b.l4 + beta * beta * b.l5;
    b.equivalence_constant = constant;
    return b;
  }

  Matrix gradient(const Matrix& f) const {
    const Matrix g = f * f.transpose();
    const Matrix g1 = 2.0 * class_mix * (class_mix.transpose() * f);
    const Matrix g2 = 2.0 * unlabeled * (prior_u.asDiagonal() * (unlabeled.transpose() * f));
    // Each quadratic term is sum_{x,x'} a_x b_x' (f_x·f_x')^2.
    auto quad = [&](const Vector& a, const Vector& b) -> Matrix {
      return 2.0 * (a.asDiagonal() * (g * (b.asDiagonal() * f)) +
                    b.asDiagonal() * (g * (a.asDiagonal() * f)));
    };
    const Matrix g3 = quad(s, s);
    const Matrix g4 = quad(s, mu);
    const Matrix g5 = quad(mu, mu);
    return -2.0 * alpha * g1 - 2.0 * beta * g2 + alpha * alpha * g3 + 2.0 * alpha * beta * g4 +
           beta * beta * g5;
  }
};

}  // namespace

FeatureMap::FeatureMap(Matrix v) : values(std::move(v)) {}

Matrix FeatureMap::scaled(const Vector& degrees) const {
  return degrees.cwiseSqrt().asDiagonal() * values;
}

NsclBreakdown nscl_loss(const PopulationSpec& spec, const FeatureMap& f) {
  const Population pop(spec);
  pop.check(f);
  return pop.loss(f.values);
}

Matrix nscl_gradient(const PopulationSpec& spec, const FeatureMap& f) {
  const Population pop(spec);
  pop.check(f);
  return pop.gradient(f.values);
}

double equivalence_certificate(const PopulationSpec& spec, const FeatureMap& f) {
  const WeightedGraph graph = build_adjacency(spec);
  const SpectralEmbedding emb = decompose(graph, f.k());
  const Matrix target = emb.gram();
  const Matrix fs = f.scaled(graph.degrees);
  const double denom = target.norm();
  const double diff = (fs * fs.transpose() - target).norm();
  return denom > 0.0 ? diff / denom : diff;
}

MinimizeResult minimize_nscl(const PopulationSpec& spec, const MinimizeOptions& opt) {
  if (opt.k < 1 || opt.k > spec.n_points()) throw InvalidInput("k must lie in [1, N]");
  if (!(opt.lr > 0.0)) throw InvalidInput("lr must be positive");
  if (opt.max_iters < 0) throw InvalidInput("max_iters must be nonnegative");
  const Population pop(spec);

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> init(-0.1, 0.1);
  Matrix f(spec.n_points(), opt.k);
  for (Index j = 0; j < f.cols(); ++j) {
    for (Index i = 0; i < f.rows(); ++i) f(i, j) = init(rng);
  }

  MinimizeResult res;
  double current = pop.loss(f).total;
  double step = opt.lr;
  int it = 0;
  for (; it < opt.max_iters; ++it) {
    const Matrix g = pop.gradient(f);
    const double gg = g.squaredNorm();
    res.grad_norm = std::sqrt(gg);
    if (res.grad_norm < opt.grad_tol) {
      res.converged = true;
      break;
    }
    // Backtracking by halving; a successful step doubles the next trial.
    bool accepted = false;
    while (step > 1e-30) {
      const Matrix trial = f - step * g;
      const double value = pop.loss(trial).total;
      if (value <= current - opt.armijo * step * gg) {
        f = trial;
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent is representable at this precision: stationary to machine accuracy.
      res.converged = true;
      break;
    }
    step *= 2.0;
  }
  res.iterations = it;
  res.f = FeatureMap(std::move(f));
  res.breakdown = pop.loss(res.f.values);
  res.certificate = equivalence_certificate(spec, res.f);
  return res;
}

}  // namespace spectral_ncd
