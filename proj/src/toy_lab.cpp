#include "spectral_ncd/toy_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <utility>

#include "spectral_ncd/errors.hpp"
#include "spectral_ncd/parallel.hpp"
#include "spectral_ncd/population_graph.hpp"
#include "spectral_ncd/residual_probe.hpp"
#include "spectral_ncd/spectral_engine.hpp"

namespace spectral_ncd {
namespace {

constexpr double kRootTol = 1e-12;
constexpr double kLawTol = 1e-9;  // distance to t̄ below which no law is claimed

Vector label_vector() {
  Vector y(4);
  y << 1.0, 1.0, 0.0, 0.0;
  return y;
}

Vector vec5(double a, double b, double c, double d, double e) {
  Vector v(5);
  v << a, b, c, d, e;
  return v;
}

// Safeguarded Newton on a bracket with g(lo) and g(hi) of opposite signs.
double bracketed_root(double lo, double hi, double tau_s, double tau_c, double t) {
  auto g = [&](double z) { return toy_cubic(z, tau_s, tau_c, t); };
  auto dg = [&](double z) {
    return 3.0 * z * z - 4.0 * tau_c * z + (tau_c * tau_c - tau_s * tau_s - 2.0 * t * t);
  };
  double glo = g(lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > kRootTol * std::max(1.0, std::abs(x)); ++it) {
    const double gx = g(x);
    if (gx == 0.0) return x;
    if ((gx < 0.0) == (glo < 0.0)) {
      lo = x;
      glo = gx;
    } else {
      hi = x;
    }
    const double d = dg(x);
    const double newton = d != 0.0 ? x - gx / d : lo - 1.0;
    x = (newton > lo && newton < hi) ? newton : 0.5 * (lo + hi);
  }
  // A last Newton polish from the best point.
  const double d = dg(x);
  if (d != 0.0) {
    const double polished = x - g(x) / d;
    if (std::abs(g(polished)) < std::abs(g(x))) x = polished;
  }
  return x;
}

struct Eigenpair {
  double value;
  Vector vector;
  bool cubic;
};

// Closed-form spectrum of T(t) with tau1 = 1, tau0 = 0.
std::vector<Eigenpair> general_spectrum(double tau_s, double tau_c, double t) {
  std::vector<Eigenpair> out;
  if (t == 0.0) {
    out.push_back({1.0 + tau_s + tau_c, vec5(0, 1, 1, 1, 1), false});
    out.push_back({1.0 + tau_s - tau_c, vec5(0, -1, 1, -1, 1), false});
    out.push_back({1.0, vec5(1, 0, 0, 0, 0), false});
    out.push_back({1.0 - tau_s + tau_c, vec5(0, 1, 1, -1, -1), false});
    out.push_back({1.0 - tau_s - tau_c, vec5(0, 1, -1, -1, 1), false});
  } else {
    out.push_back({1.0 + tau_s - tau_c, vec5(0, -1, 1, -1, 1), false});
    out.push_back({1.0 - tau_s - tau_c, vec5(0, 1, -1, -1, 1), false});
    for (const double z : toy_cubic_roots(tau_s, tau_c, t)) {
      const double lambda = 1.0 + z;
      const double a = z / (2.0 * t);
      const double b = tau_s * z / (2.0 * (z - tau_c) * t);
      out.push_back({lambda, vec5(1, a, a, b, b), true});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Eigenpair& l, const Eigenpair& r) { return l.value > r.value; });
  for (auto& p : out) p.vector.normalize();
  return out;
}

void check_tau(const ToyParams& p) {
  const double vals[] = {p.tau1, p.tau_s, p.tau_c, p.tau0};
  for (double v : vals) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw InvalidInput("toy probabilities must lie in [0, 1]");
    }
  }
}

}  // namespace

std::string to_string(ToyCase c) {
  switch (c) {
    case ToyCase::case1: return "case1";
    case ToyCase::case2: return "case2";
    case ToyCase::case3: return "case3";
    case ToyCase::general_t: return "general_t";
  }
  return "general_t";
}

bool ToyScenario::extreme_regime() const { return params.tau1 == 1.0 && params.tau0 == 0.0; }

Matrix toy_matrix(const ToyParams& p, double t) {
  const double a = p.tau1, s = p.tau_s, c = p.tau_c, o = p.tau0;
  Matrix m(5, 5);
  m << a, t, t, o, o,
       t, a, c, s, o,
       t, c, a, o, s,
       o, s, o, a, c,
       o, o, s, c, a;
  return m;
}

Matrix toy_case3_matrix(const ToyParams& p) {
  const double a = p.tau1, s = p.tau_s, c = p.tau_c, o = p.tau0;
  Matrix m(5, 5);
  m << a, s, o, s, o,
       s, a, c, s, o,
       o, c, a, o, s,
       s, s, o, a, c,
       o, o, s, c, a;
  return m;
}

ToyScenario build_toy(ToyCase which, const ToyParams& params, std::optional<double> t) {
  check_tau(params);
  ToyScenario sc;
  sc.params = params;
  sc.which = which;
  sc.y = label_vector();
  const double ts = params.tau_s, tc = params.tau_c;
  switch (which) {
    case ToyCase::case1:
      sc.t = tc;
      sc.matrix = toy_matrix(params, sc.t);
      if (!(ts < 1.5 * tc)) sc.warnings.push_back("case 1 law assumes tau_s < 1.5 tau_c");
      break;
    case ToyCase::case2:
      sc.t = params.tau0;
      sc.matrix = toy_matrix(params, sc.t);
      if (ts > tc) {
        sc.warnings.push_back(
            "eigenvalue 1 - tau_s + tau_c falls below 1; the labeled direction is ranked above it");
      }
      break;
    case ToyCase::case3:
      sc.t = ts;
      sc.matrix = toy_case3_matrix(params);
      if (!(ts < tc && tc < 1.5 * ts)) sc.warnings.push_back("case 3 law assumes tau_s < tau_c < 1.5 tau_s");
      break;
    case ToyCase::general_t:
      if (!t) throw InvalidInput("general_t scenario needs a value for t");
      if (!std::isfinite(*t) || *t < 0.0 || *t >= ts) throw InvalidInput("t must lie in [0, tau_s)");
      sc.t = *t;
      sc.matrix = toy_matrix(params, sc.t);
      if (!(tc < ts && ts < 1.5 * tc)) sc.warnings.push_back("t-law assumes tau_c < tau_s < 1.5 tau_c");
      break;
  }
  if (!sc.extreme_regime()) sc.warnings.push_back("closed forms require tau1 = 1 and tau0 = 0");
  if (params.tau1 <= std::max(ts, tc)) sc.warnings.push_back("tau1 should dominate tau_s and tau_c");
  if (std::min(ts, tc) <= params.tau0) sc.warnings.push_back("tau_s and tau_c should dominate tau0");
  if (ts == tc) sc.warnings.push_back("tau_s equals tau_c; the top-2 subspace is not unique");
  return sc;
}

std::optional<double> toy_threshold(double tau_s, double tau_c) {
  const double den = 2.0 * tau_c - tau_s;
  if (!(den > 0.0)) return std::nullopt;
  return std::sqrt(2.0 * (tau_s - tau_c) * (tau_s - tau_c) * tau_c / den);
}

double toy_cubic(double z, double tau_s, double tau_c, double t) {
  return ((z - 2.0 * tau_c) * z + (tau_c * tau_c - tau_s * tau_s - 2.0 * t * t)) * z +
         2.0 * tau_c * t * t;
}

std::array<double, 3> toy_cubic_roots(double tau_s, double tau_c, double t) {
  if (!(t > 0.0)) throw InvalidInput("cubic brackets need t > 0");
  if (!(tau_c > 0.0)) throw InvalidInput("cubic brackets need tau_c > 0");
  auto g = [&](double z) { return toy_cubic(z, tau_s, tau_c, t); };
  // g(0) = 2 tau_c t² > 0, g(tau_c) = -tau_s² tau_c < 0 and g(tau_c + tau_s) < 0.
  double lo = -(tau_c + tau_s);
  while (g(lo) >= 0.0) lo = 2.0 * lo - 1.0;
  double hi = tau_c + tau_s;
  if (g(hi) >= 0.0) hi = tau_c;  // tau_s = 0 degenerate: fall back to the tau_c sign change
  double top = std::max(hi, 1.0);
  while (g(top) <= 0.0) top = 2.0 * top + 1.0;
  return {bracketed_root(hi, top, tau_s, tau_c, t), bracketed_root(0.0, tau_c, tau_s, tau_c, t),
          bracketed_root(lo, 0.0, tau_s, tau_c, t)};
}

double toy_r(double lambda1, double tau_s, double tau_c) {
  const double d = lambda1 - 1.0 - tau_c;
  return 2.0 * tau_s * tau_s / (d * d + tau_s * tau_s);
}

ToyPrediction closed_form_oracle(const ToyScenario& sc) {
  if (!sc.extreme_regime()) throw InvalidInput("closed forms require tau1 = 1 and tau0 = 0");
  const double ts = sc.params.tau_s, tc = sc.params.tau_c;
  ToyPrediction pred;
  pred.t_bar = toy_threshold(ts, tc);

  std::vector<Eigenpair> spec;
  if (sc.which == ToyCase::case3) {
    // Swapping objects 3 and 4 maps T3 onto T(t = tau_s) with tau_s and tau_c exchanged.
    spec = general_spectrum(tc, ts, ts);
    for (auto& p : spec) std::swap(p.vector(2), p.vector(3));
  } else {
    spec = general_spectrum(ts, tc, sc.t);
  }
  pred.eigenvalues.resize(5);
  pred.eigenvectors.resize(5, 5);
  for (Index i = 0; i < 5; ++i) {
    const auto& p = spec[static_cast<std::size_t>(i)];
    pred.eigenvalues(i) = p.value;
    pred.eigenvectors.col(i) = p.vector;
    canonicalize_sign(pred.eigenvectors.col(i));
    pred.from_cubic.push_back(p.cubic);
  }

  switch (sc.which) {
    case ToyCase::case1:
      if (ts < 1.5 * tc) {
        pred.residual_predicted = 0.0;
        pred.regime = "case 1: residual 0";
      }
      break;
    case ToyCase::case3:
      if (ts < tc && tc < 1.5 * ts) {
        pred.residual_predicted = 1.0;
        pred.regime = "case 3 harmful regime: residual 1";
      }
      break;
    case ToyCase::case2:
    case ToyCase::general_t:
      if (sc.t == 0.0) {
        if (ts > tc) {
          pred.residual_predicted = 1.0;
          pred.regime = "t = 0, tau_s > tau_c: residual 1";
        } else if (ts < tc) {
          pred.residual_predicted = 0.0;
          pred.regime = "t = 0, tau_s < tau_c: residual 0";
        }
      } else if (tc < ts && ts < 1.5 * tc && pred.t_bar && sc.t < ts) {
        if (std::abs(sc.t - *pred.t_bar) < kLawTol) break;
        if (sc.t > *pred.t_bar) {
          pred.residual_predicted = 0.0;
          pred.regime = "t above threshold: residual 0";
        } else {
          pred.residual_predicted = toy_r(pred.eigenvalues(0), ts, tc);
          pred.regime = "t below threshold: residual r(t)";
        }
      }
      break;
  }
  if (!pred.residual_predicted) pred.regime = "no closed-form law for these parameters";
  return pred;
}

ToyResidual toy_residual(const ToyScenario& sc, bool normalized) {
  ToyResidual out;
  SpectralEmbedding e;
  if (normalized) {
    const WeightedGraph g = WeightedGraph::from_adjacency(sc.adjacency(), 1);
    e = decompose(g, 2);
  } else {
    e = decompose(sc.matrix, 1, 2);
    if (sc.extreme_regime()) out.predicted = closed_form_oracle(sc).residual_predicted;
  }
  out.eigenvalues = e.eigenvalues;
  out.numeric = residual(e.u_top, sc.y).residual;
  if (out.predicted) out.agrees = std::abs(*out.predicted - out.numeric) < 1e-6;
  return out;
}

std::vector<SweepRow> sweep_t(const ToyParams& params, const std::vector<double>& grid, bool normalized) {
  std::vector<SweepRow> rows(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) {
    const ToyScenario sc = build_toy(ToyCase::general_t, params, grid[i]);
    const ToyResidual res = toy_residual(sc, normalized);
    SweepRow& row = rows[i];
    row.t = grid[i];
    row.residual_numeric = res.numeric;
    row.residual_predicted = res.predicted;
    row.t_bar = toy_threshold(params.tau_s, params.tau_c);
    for (Index j = 0; j < 5; ++j) row.lambda[static_cast<std::size_t>(j)] = res.eigenvalues(j);
  });
  return rows;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "t,residual_numeric,residual_predicted,t_bar,lambda1,lambda2,lambda3,lambda4,lambda5\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.residual_numeric) << ','
       << (r.residual_predicted ? format_double(*r.residual_predicted) : "") << ','
       << (r.t_bar ? format_double(*r.t_bar) : "");
    for (double l : r.lambda) os << ',' << format_double(l);
    os << '\n';
  }
}

}  // namespace spectral_ncd
