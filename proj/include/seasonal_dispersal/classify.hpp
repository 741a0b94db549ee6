#pragma once

#include "seasonal_dispersal/periodic.hpp"
#include "seasonal_dispersal/problem.hpp"
#include "seasonal_dispersal/spectral.hpp"

#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdisp {

enum class Prediction { extinction, persistence, marginal };
enum class Outcome { extinct, persistent, undecided };

std::string_view to_string(Prediction p);
std::string_view to_string(Outcome o);

struct ClassifyOptions {
  std::size_t periods = 300;
  double extinct_threshold = 1e-6;
  /// |lambda_p_omega| <= margin is marginal.
  double margin = 0.05;
  /// Good-season substeps; 0 selects default_substeps().
  std::size_t substeps = 0;
  double periodic_tol = 1e-8;
  int max_periods = 5000;
  double eigen_tol = kDefaultEigenTol;
  int eigen_max_iter = kDefaultEigenMaxIter;
  /// Substeps for the Floquet cross-check in dichotomy_grid.
  std::size_t floquet_substeps = 1024;
};

struct DichotomyVerdict {
  double lambda_p = 0.0;
  double lambda_p_omega = 0.0;
  Prediction predicted = Prediction::marginal;
  Outcome observed = Outcome::undecided;
  /// Geometric mean of sup u((i+1) omega) / sup u(i omega) over the last 10
  /// periods. When sup u underflows below 1e-250 the window ends at the last
  /// period end above that floor.
  double per_period_ratio = std::numeric_limits<double>::quiet_NaN();
  /// Theta(u(., P omega), U(., 0)) when a periodic orbit was available.
  double theta_to_orbit = std::numeric_limits<double>::quiet_NaN();
  /// sup u(., i omega), i = 0..P.
  std::vector<double> sup_history;
  /// Theta(u(., i omega), U(., 0)), i = 0..P (empty without an orbit).
  std::vector<double> theta_history;
  Field final_state;
  std::optional<Field> orbit_start;
  bool degenerate_input = false;
  std::string orbit_error;

  /// Predicted and observed fate agree (marginal predictions always agree).
  bool agrees() const;
};

/// Long-time simulation compared with the sign of lambda_p_omega. Requires
/// periods >= 50.
DichotomyVerdict classify_run(const Problem& problem, const Field& u0,
                              const ClassifyOptions& options = {});

struct DecayRateReport {
  bool skipped = true;
  bool passed = false;
  double ratio = 0.0;
  double linear_rate = 0.0;  ///< exp(-lambda_p_omega omega)
  double bound = 0.0;        ///< linear_rate + slack
};

/// In an observed extinction, checks that the measured per-period ratio does
/// not exceed the linearized multiplier plus slack.
DecayRateReport decay_rate_check(const DichotomyVerdict& verdict, const SeasonClock& clock,
                                 double slack = 0.02);

struct DichotomyRow {
  double delta = 0.0;
  double rho = 0.0;
  double lambda_p_omega = std::numeric_limits<double>::quiet_NaN();
  double lambda_p_omega_floquet = std::numeric_limits<double>::quiet_NaN();
  Prediction predicted = Prediction::marginal;
  Outcome observed = Outcome::undecided;
  double per_period_ratio = std::numeric_limits<double>::quiet_NaN();
  double theta_to_orbit = std::numeric_limits<double>::quiet_NaN();
  bool agree = false;
  std::string error;
};

/// Classifies every (delta, rho) cell of a template problem. Rows are ordered
/// by delta, then rho. Requires at least two values in each list.
std::vector<DichotomyRow> dichotomy_grid(const ProblemSpec& tmpl, const SeedSpec& seed,
                                         const std::vector<double>& deltas,
                                         const std::vector<double>& rhos,
                                         const ClassifyOptions& options = {});

}  // namespace sdisp
