#include "spectral_ncd/bound_analyzer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/residual_probe.hpp"

namespace spectral_ncd {
namespace {

constexpr double kFeasibilityTol = 1e-8;
constexpr double kZeroNorm = 1e-12;
constexpr double kThetaTol = 1e-9;
constexpr double kZeroEigen = 1e-9;
constexpr double kIndexTol = 1e-9;
constexpr double kStructureTol = 1e-8;

void check_labels(Index n_unlabeled, const Vector& y) {
  if (y.size() != n_unlabeled) {
    throw InvalidInput("label vector has " + std::to_string(y.size()) + " entries, expected " +
                       std::to_string(n_unlabeled));
  }
}

// Pseudoinverse of (s I - M) for symmetric M given its eigendecomposition.
Matrix shifted_pinv(const SymmetricEigen& eig, double s) {
  Vector inv(eig.values.size());
  for (Index j = 0; j < inv.size(); ++j) {
    const double gap = s - eig.values(j);
    inv(j) = std::abs(gap) >= kPinvCutoff ? 1.0 / gap : 0.0;
  }
  return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

double nearest_gap(const Vector& values, double s) {
  double best = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < values.size(); ++j) best = std::min(best, std::abs(s - values(j)));
  return best;
}

double zero_threshold(const Matrix& m) {
  return kZeroEigen * std::max(1.0, m.cwiseAbs().maxCoeff());
}

double column_spread(const Eigen::Ref<const Vector>& c) {
  return c.size() == 0 ? 0.0 : c.maxCoeff() - c.minCoeff();
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::ill_posed: return "ill-posed";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "not-applicable";
}

KnowledgeDecomposition theorem4_analysis(const SpectralEmbedding& e, const Vector& y) {
  check_labels(e.n_unlabeled(), y);
  KnowledgeDecomposition kd;
  kd.ignorance_space = e.u_rest.transpose() * y;
  const double ynorm = y.norm();
  kd.ignorance_degree = ynorm > 0.0 ? kd.ignorance_space.norm() / ynorm : 0.0;
  kd.extra_knowledge = e.l_rest;
  const Matrix& lr = e.l_rest;
  if (lr.size() == 0) {
    kd.projector_l_rest = Matrix::Zero(lr.cols(), lr.cols());
  } else {
    kd.projector_l_rest = lr.transpose() * pseudo_inverse(lr * lr.transpose()) * lr;
  }
  const Vector rest = kd.ignorance_space - kd.projector_l_rest * kd.ignorance_space;
  kd.theorem4_bound = rest.squaredNorm();
  kd.residual = residual(e.u_top, y).residual;
  if (kd.residual > kd.theorem4_bound + 1e-9 * std::max(1.0, y.squaredNorm())) {
    throw std::logic_error("projection bound violated: residual " + std::to_string(kd.residual) +
                           " > bound " + std::to_string(kd.theorem4_bound));
  }
  return kd;
}

ConditionCheck theorem4_condition(const SpectralEmbedding& e, const Matrix& normalized,
                                  const Vector& y) {
  check_labels(e.n_unlabeled(), y);
  if (normalized.rows() != e.size()) throw InvalidInput("graph and embedding sizes differ");
  const Index nl = e.n_labeled, nu = e.n_unlabeled(), rest = e.v_rest.cols();
  ConditionCheck out;
  out.residual = residual(e.u_top, y).residual;
  if (nl == 0 || rest == 0) {
    // No labeled rows or nothing outside the top-k: the condition is vacuous.
    out.verdict = out.residual < kFeasibilityTol ? Verdict::holds : Verdict::fails;
    out.feasibility_residual = (e.u_rest.transpose() * y).squaredNorm();
    if (nl == 0) out.verdict = Verdict::not_applicable;
    out.omega = Vector::Zero(nl);
    return out;
  }
  const Matrix a_uu = normalized.bottomRightCorner(nu, nu);
  const Matrix a_ul = normalized.bottomLeftCorner(nu, nl);
  const SymmetricEigen eig = symmetric_eigen_descending(a_uu);

  Vector c(rest);
  bool ill_posed = false;
  for (Index i = 0; i < rest; ++i) {
    const double sigma = e.eigenvalues(e.k + i);
    const auto li = e.l_rest.col(i);
    if (nearest_gap(eig.values, sigma) < kPinvCutoff) {
      out.coincident.push_back(e.k + i);
      // With l_i = 0 the block equations reduce to A_uu u_i = σ_i u_i and the
      // coefficient is simply u_iᵀy; otherwise the pseudoinverse loses u_i.
      if (li.norm() > kFeasibilityTol) ill_posed = true;
      c(i) = e.u_rest.col(i).dot(y);
      continue;
    }
    c(i) = y.dot(shifted_pinv(eig, sigma) * (a_ul * li));
  }
  const Matrix lt = e.l_rest.transpose();  // rows l_iᵀ
  out.omega = pseudo_inverse(lt) * c;
  out.feasibility_residual = (c - lt * out.omega).squaredNorm();
  if (ill_posed) {
    out.verdict = Verdict::ill_posed;
  } else {
    out.verdict = out.feasibility_residual < kFeasibilityTol ? Verdict::holds : Verdict::fails;
  }
  return out;
}

ConditionCheck theorem4_condition(const SpectralEmbedding& e, const WeightedGraph& graph,
                                  const Vector& y) {
  return theorem4_condition(e, graph.normalized, y);
}

Index null_rank_theta(const ApproxGraph& ap) {
  if (ap.n_unlabeled() == 0 || ap.eta_l == 0.0) return 0;
  const Matrix m = ap.a_uu - ap.eta_u * ap.eta_u.transpose() / ap.eta_l;
  const double scale = spectral_norm(ap.a_uu);
  Eigen::BDCSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  return static_cast<Index>((s.array() < kThetaTol * scale).count());
}

CoverageReport coverage_analysis(const ApproxGraph& ap, Index k, const Vector& y) {
  const Index nu = ap.n_unlabeled(), nl = ap.n_labeled;
  check_labels(nu, y);
  CoverageReport r;
  const SymmetricEigen eig = symmetric_eigen_descending(ap.a_uu);
  r.d = eig.values;
  r.q = eig.vectors;
  r.a_uu_psd = nu == 0 || r.d(nu - 1) >= -kPinvCutoff;
  if (!r.a_uu_psd) r.warnings.push_back("A_uu is not positive semi-definite; structural assumptions fail");
  if (ap.eta_l == 0.0) r.warnings.push_back("eta_l is zero; theta is undefined and reported as 0");
  r.theta = null_rank_theta(ap);

  const SpectralEmbedding bar = decompose(ap.a_bar, nl, k);
  r.sigma_bar = bar.eigenvalues;
  if (bar.degenerate_gap) r.warnings.push_back("approximate graph has a degenerate eigengap at k");

  // Perturbation and the eigengap of the source matrix.
  const SpectralEmbedding src = decompose(ap.source, nl, k);
  r.perturbation = spectral_norm(ap.source - ap.a_bar);
  if (src.degenerate_gap) {
    r.warnings.push_back("source eigengap below tolerance; eigengap term not computed");
  } else {
    r.eigengap_term = r.perturbation / src.eigengap;
  }

  r.l_frak_rest = bar.l_rest.transpose() * Vector::Ones(nl);
  const Vector uy = bar.u_rest.transpose() * y;
  const double ynorm = y.norm();
  r.ignorance_degree = ynorm > 0.0 ? uy.norm() / ynorm : 0.0;
  const double ln = r.l_frak_rest.norm(), un = uy.norm();
  if (ln < kZeroNorm || un < kZeroNorm) {
    r.kappa_undefined = true;
    r.kappa = 0.0;
    r.warnings.push_back("coverage is undefined (zero vector); reported as 0");
  } else {
    r.kappa = std::clamp(uy.dot(r.l_frak_rest) / (ln * un), -1.0, 1.0);
  }
  r.residual_bar = residual(bar.u_top, y).residual;
  if (r.kappa_undefined) {
    r.exact_identity_rhs = uy.squaredNorm();
  } else {
    const Vector proj = r.l_frak_rest * (r.l_frak_rest.dot(uy) / (ln * ln));
    r.exact_identity_rhs = (uy - proj).squaredNorm();  // (1 - κ²)‖Ū♭ᵀy‖², stably
  }

  // Index set: non-top indices with a nonzero labeled sum.
  std::vector<double> omegas;
  double deficiency = 0.0;
  for (Index i = 0; i < r.l_frak_rest.size(); ++i) {
    if (std::abs(r.l_frak_rest(i)) <= kIndexTol) continue;
    const Index idx = k + i;
    r.index_set.push_back(idx);
    omegas.push_back(y.dot(shifted_pinv(eig, bar.eigenvalues(idx)) * ap.eta_u));
    deficiency += 1.0 - bar.u_rest.col(i).squaredNorm();
  }
  r.omega = Eigen::Map<const Vector>(omegas.data(), static_cast<Index>(omegas.size()));
  if (!r.index_set.empty()) {
    r.mean_unlabeled_deficiency = deficiency / static_cast<double>(r.index_set.size());
  }

  r.y_tilde = r.q.transpose() * y;
  r.eta_tilde = r.q.transpose() * ap.eta_u;

  // Pairwise lower bound over A_uu eigen-indices beyond k.
  std::vector<double> ratios;
  for (Index j = k; j < nu; ++j) {
    if (std::abs(r.eta_tilde(j)) <= kZeroNorm) {
      r.excluded_pairs.push_back(j);
      continue;
    }
    ratios.push_back(r.y_tilde(j) / r.eta_tilde(j));
  }
  if (!r.excluded_pairs.empty()) {
    r.warnings.push_back("eigen-directions with vanishing eta projection excluded from the coverage bound");
  }
  const bool any_pos = std::any_of(ratios.begin(), ratios.end(), [](double v) { return v > 0.0; });
  const bool any_neg = std::any_of(ratios.begin(), ratios.end(), [](double v) { return v < 0.0; });
  if (ratios.empty()) {
    r.warnings.push_back("no admissible eigen-directions for the coverage bound");
  } else if (any_pos && any_neg) {
    r.warnings.push_back("ratios y~/eta~ change sign; the coverage bound hypothesis fails");
  } else {
    double best = 1.0;
    for (std::size_t a = 0; a < ratios.size(); ++a) {
      for (std::size_t b = a; b < ratios.size(); ++b) {
        const double ra = std::abs(ratios[a]), rb = std::abs(ratios[b]);
        const double v = ra + rb > 0.0 ? 2.0 * std::sqrt(ra * rb) / (ra + rb) : 1.0;
        best = std::min(best, v);
      }
    }
    r.kappa_lower_bound = best;
  }
  return r;
}

LbarStructure lbar_structure_check(const ApproxGraph& ap, Index k) {
  LbarStructure s;
  const Index nu = ap.n_unlabeled(), nl = ap.n_labeled;
  if (nu > 0) {
    const SymmetricEigen eig = symmetric_eigen_descending(ap.a_uu);
    s.a_uu_psd = eig.values(nu - 1) >= -kPinvCutoff;
  }
  s.assumption_violated = !s.a_uu_psd;
  s.theta = null_rank_theta(ap);

  const SpectralEmbedding bar = decompose(ap.a_bar, nl, k);
  const double zero = zero_threshold(ap.a_bar);
  for (Index j = 0; j < bar.k; ++j) {
    s.top_row_spread = std::max(s.top_row_spread, column_spread(bar.l_top.col(j)));
  }
  bool top_nonzero = true;
  for (Index j = 0; j < bar.k; ++j) top_nonzero = top_nonzero && std::abs(bar.eigenvalues(j)) > zero;

  bool ok = top_nonzero && s.top_row_spread < kStructureTol;
  bool seen_zero = false;
  for (Index i = 0; i < bar.v_rest.cols(); ++i) {
    const auto col = bar.l_rest.col(i);
    if (std::abs(bar.eigenvalues(bar.k + i)) > zero) {
      // Nonzero eigenvalues come first under |σ| ordering; a later one breaks the split.
      const double spread = column_spread(col);
      s.rest_row_spread = std::max(s.rest_row_spread, spread);
      const bool good = spread < kStructureTol && !seen_zero;
      s.rest_kinds.push_back(good ? ColumnKind::identical_rows : ColumnKind::unstructured);
      ok = ok && good;
    } else {
      seen_zero = true;
      ++s.zero_columns;
      const double dot = std::abs(col.sum());
      s.trailing_dot = std::max(s.trailing_dot, dot);
      const bool good = dot < kStructureTol;
      s.rest_kinds.push_back(good ? ColumnKind::orthogonal_to_ones : ColumnKind::unstructured);
      ok = ok && good;
    }
  }
  s.holds = ok && !s.assumption_violated;
  return s;
}

ApproxErrorBound approx_error_bound(const Matrix& normalized, const ApproxGraph& ap, Index k,
                                    const Vector& y) {
  check_labels(ap.n_unlabeled(), y);
  if (normalized.rows() != ap.size()) throw InvalidInput("graph and approximation sizes differ");
  ApproxErrorBound b;
  const SpectralEmbedding e = decompose(normalized, ap.n_labeled, k);
  const SpectralEmbedding bar = decompose(ap.a_bar, ap.n_labeled, k);
  b.lhs = residual(e.u_top, y).residual;
  b.perturbation = spectral_norm(normalized - ap.a_bar);
  b.eigengap = e.eigengap;
  if (e.degenerate_gap) {
    b.warnings.push_back("eigengap below tolerance; approximation bound not computed");
    return b;
  }
  b.gap_ok = b.perturbation < 0.5 * b.eigengap;
  if (!b.gap_ok) b.warnings.push_back("perturbation exceeds half the eigengap; bound not applicable");
  const double rhs = residual(bar.u_top, y).residual + 2.0 * b.perturbation / b.eigengap * y.squaredNorm();
  b.rhs = rhs;
  if (rhs > 0.0) b.ratio = b.lhs / rhs;
  return b;
}

ApproxErrorBound approx_error_bound(const WeightedGraph& graph, const ApproxGraph& ap, Index k,
                                    const Vector& y) {
  return approx_error_bound(graph.normalized, ap, k, y);
}

double cosine_functional(const Vector& omega, const Vector& l) {
  const Vector ol = omega.cwiseProduct(l);
  const double den = ol.norm() * l.norm();
  if (den == 0.0) throw InvalidInput("cosine functional undefined at this point");
  return l.dot(ol) / den;
}

namespace {

// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v) {
  Vector u = v;
  std::sort(u.data(), u.data() + u.size(), std::greater<double>());
  double cumsum = 0.0, theta = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    cumsum += u(i);
    const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
    if (u(i) - t > 0.0) theta = t;
  }
  return (v.array() - theta).max(0.0).matrix();
}

// On the simplex p = l², g = ωᵀp / sqrt((ω²)ᵀp).
double simplex_value(const Vector& w, const Vector& w2, const Vector& p) {
  return w.dot(p) / std::sqrt(w2.dot(p));
}

}  // namespace

CosineMinimum cosine_functional_min(const Vector& omega, std::uint64_t seed, int starts) {
  const Index n = omega.size();
  if (n == 0) throw InvalidInput("omega must be non-empty");
  if ((omega.array() <= 0.0).any()) throw InvalidInput("every omega entry must be positive");
  if (starts < 1) throw InvalidInput("need at least one start");

  // Rescaling ω leaves g unchanged; normalizing keeps step sizes comparable.
  const Vector w = omega / omega.maxCoeff();
  const Vector w2 = w.cwiseAbs2();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);

  CosineMinimum out;
  out.min_value = std::numeric_limits<double>::infinity();
  Vector best_p;
  for (int s = 0; s < starts; ++s) {
    Vector p(n);
    for (Index i = 0; i < n; ++i) p(i) = expo(rng);
    p /= p.sum();
    double val = simplex_value(w, w2, p);
    double step = 1.0;
    for (int it = 0; it < 5000; ++it) {
      const double a = w.dot(p), b = w2.dot(p);
      const Vector grad = w / std::sqrt(b) - (a / (2.0 * b * std::sqrt(b))) * w2;
      bool moved = false;
      while (step > 1e-16) {
        const Vector trial = project_simplex(p - step * grad);
        const double tv = simplex_value(w, w2, trial);
        if (tv < val - 1e-4 * grad.dot(p - trial)) {
          moved = (p - trial).lpNorm<Eigen::Infinity>() > 1e-15;
          p = trial;
          val = tv;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
      step *= 2.0;
    }
    if (val < out.min_value) {
      out.min_value = val;
      best_p = p;
    }
  }
  out.argmin = best_p.cwiseSqrt();

  out.closed_form = 1.0;
  out.sqrt_denominator_form = std::numeric_limits<double>::infinity();
  // Distinct pairs; a single entry is paired with itself.
  for (Index i = 0; i < n; ++i) {
    for (Index j = n == 1 ? i : i + 1; j < n; ++j) {
      const double wi = omega(i), wj = omega(j);
      out.closed_form = std::min(out.closed_form, 2.0 * std::sqrt(wi * wj) / (wi + wj));
      out.sqrt_denominator_form =
          std::min(out.sqrt_denominator_form, 2.0 * std::sqrt(wi * wj) / (std::sqrt(wi) + std::sqrt(wj)));
    }
  }
  out.closed_form_gap = std::abs(out.min_value - out.closed_form);
  out.sqrt_denominator_gap = std::abs(out.min_value - out.sqrt_denominator_form);
  return out;
}

std::vector<OmegaRatioRow> omega_ratio_diagnostics(const ApproxGraph& ap, Index k, const Vector& y) {
  const CoverageReport cov = coverage_analysis(ap, k, y);
  const Index m = static_cast<Index>(cov.index_set.size());
  std::vector<std::optional<double>> r(static_cast<std::size_t>(m));
  for (Index a = 0; a < m; ++a) {
    const double sigma = cov.sigma_bar(cov.index_set[static_cast<std::size_t>(a)]);
    Index arg = 0;
    for (Index j = 1; j < cov.d.size(); ++j) {
      if (std::abs(cov.d(j) - sigma) < std::abs(cov.d(arg) - sigma)) arg = j;
    }
    if (cov.d.size() > 0 && std::abs(cov.eta_tilde(arg)) > kZeroNorm) {
      r[static_cast<std::size_t>(a)] = cov.y_tilde(arg) / cov.eta_tilde(arg);
    }
  }
  std::vector<OmegaRatioRow> rows;
  for (Index a = 0; a < m; ++a) {
    for (Index b = a + 1; b < m; ++b) {
      OmegaRatioRow row;
      row.i = cov.index_set[static_cast<std::size_t>(a)];
      row.j = cov.index_set[static_cast<std::size_t>(b)];
      row.omega_ratio = cov.omega(b) != 0.0 ? cov.omega(a) / cov.omega(b)
                                            : std::numeric_limits<double>::infinity();
      const auto& ra = r[static_cast<std::size_t>(a)];
      const auto& rb = r[static_cast<std::size_t>(b)];
      if (ra && rb && *rb != 0.0) row.r_ratio = *ra / *rb;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace spectral_ncd
