#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spectral_ncd/linalg.hpp"

namespace spectral_ncd {

// The five objects are ordered: labeled object, red cube, red sphere,
// blue cube, blue sphere. Unlabeled labels are by color.

enum class ToyCase { case1, case2, case3, general_t };

std::string to_string(ToyCase c);

struct ToyParams {
  double tau1 = 1.0;
  double tau_s = 0.25;
  double tau_c = 0.2;
  double tau0 = 0.0;
};

struct ToyScenario {
  ToyParams params;
  double t = 0.0;  // labeled-to-red strength (for case 3: tau_s by construction)
  ToyCase which = ToyCase::general_t;
  Matrix matrix;   // T, 5x5
  Vector y;        // (1, 1, 0, 0)
  std::vector<std::string> warnings;

  Matrix adjacency() const { return matrix * matrix; }
  /// tau1 = 1 and tau0 = 0, where every closed form applies.
  bool extreme_regime() const;
};

/// T(t) with the given parameters: first row (tau1, t, t, tau0, tau0).
Matrix toy_matrix(const ToyParams& p, double t);

/// Case 3 matrix: the labeled object shares shape with one red and one blue object.
Matrix toy_case3_matrix(const ToyParams& p);

/// Builds a preset (t ignored) or a general_t scenario (t required, in [0, tau_s)).
ToyScenario build_toy(ToyCase which, const ToyParams& params, std::optional<double> t = std::nullopt);

/// sqrt(2(tau_s - tau_c)² tau_c / (2 tau_c - tau_s)); empty when 2 tau_c <= tau_s.
std::optional<double> toy_threshold(double tau_s, double tau_c);

/// g(z) = z³ - 2 tau_c z² + (tau_c² - tau_s² - 2t²) z + 2 tau_c t².
double toy_cubic(double z, double tau_s, double tau_c, double t);

/// The three real roots of g in descending order, for t > 0.
std::array<double, 3> toy_cubic_roots(double tau_s, double tau_c, double t);

/// 2 tau_s² / ((lambda1 - 1 - tau_c)² + tau_s²).
double toy_r(double lambda1, double tau_s, double tau_c);

struct ToyPrediction {
  std::optional<double> t_bar;
  Vector eigenvalues;            // descending
  Matrix eigenvectors;           // unit columns, aligned with eigenvalues
  std::vector<bool> from_cubic;  // eigenvalue is a root of g (shifted by 1)
  std::optional<double> residual_predicted;
  std::string regime;            // human-readable law that produced the prediction
};

/// Closed-form spectrum and residual law. Requires tau1 = 1, tau0 = 0.
ToyPrediction closed_form_oracle(const ToyScenario& scenario);

struct ToyResidual {
  std::optional<double> predicted;
  double numeric = 0.0;
  std::optional<bool> agrees;  // |predicted - numeric| < 1e-6
  Vector eigenvalues;          // numeric spectrum used, descending
};

/// Residual of y against the top-2 eigenvectors of T with the first row
/// dropped. With `normalized` the spectrum of D^{-1/2}T²D^{-1/2} is used
/// instead and no prediction is attached.
ToyResidual toy_residual(const ToyScenario& scenario, bool normalized = false);

struct SweepRow {
  double t = 0.0;
  double residual_numeric = 0.0;
  std::optional<double> residual_predicted;
  std::optional<double> t_bar;
  std::array<double, 5> lambda{};
};

/// One row per t (general_t scenarios); evaluated in parallel, returned in grid order.
std::vector<SweepRow> sweep_t(const ToyParams& params, const std::vector<double>& grid,
                              bool normalized = false);

/// CSV with header `t,residual_numeric,residual_predicted,t_bar,lambda1,...,lambda5`.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// Shortest round-trip decimal form (17 significant digits).
std::string format_double(double v);

}  // namespace spectral_ncd
