#pragma once

#include "seasonal_dispersal/dispersal_operator.hpp"
#include "seasonal_dispersal/problem.hpp"
#include "seasonal_dispersal/profile.hpp"
#include "seasonal_dispersal/season.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace sdisp {

/// Principal eigenpair of phi -> -d L[phi] - b phi together with its seasonal
/// counterpart.
struct SpectralResult {
  double lambda_p = 0.0;
  /// Positive eigenvector, max-normalized.
  Field phi;
  /// ||(-d L[phi] - b phi) - lambda_p phi||_inf
  double residual = 0.0;
  int iterations = 0;
  /// delta rho + (1 - rho) lambda_p; NaN unless a season clock was supplied.
  double lambda_p_omega = std::numeric_limits<double>::quiet_NaN();
  /// d - max(b + d rowsum)  <  lambda_p  <  d - max b
  double bound_lower = 0.0;
  double bound_upper = 0.0;
  /// Potential the eigenproblem was solved for.
  Field b;
  H2Report h2;
};

inline constexpr double kDefaultEigenTol = 1e-10;
inline constexpr int kDefaultEigenMaxIter = 200000;

/// Positive power iteration on M + s I with M = d (W - I) + diag(b) and
/// s = d + max(0, -min diag M) + 1. Once a Collatz-Wielandt bracket is
/// available the iteration switches to shifted inverse iteration with a shift
/// above the bracket, which keeps the iteration matrix entrywise positive.
/// Throws NumericalError on non-convergence within max_iter.
SpectralResult principal_eigen(const DispersalOperator& op, const Field& b,
                               double tol = kDefaultEigenTol,
                               int max_iter = kDefaultEigenMaxIter);

/// Same, and fills lambda_p_omega from the clock.
SpectralResult principal_eigen(const DispersalOperator& op, const Field& b,
                               const SeasonClock& clock, double tol = kDefaultEigenTol,
                               int max_iter = kDefaultEigenMaxIter);

/// delta rho + (1 - rho) lambda_p
double lambda_p_omega(const SeasonClock& clock, double lambda_p);

/// Integral of sigma over [0, t]: delta on the bad season, lambda_p - a on the
/// good season. Requires t in [0, omega].
double sigma_integral(const SeasonClock& clock, const TimeProfile& a, double lambda_p,
                      double t);

/// phi_p(x, t) = exp(lambda_p_omega t - int_0^t sigma) phi(x) for t in [0, omega].
Field periodic_eigenfunction(const SpectralResult& res, const SeasonClock& clock,
                             const TimeProfile& a, double t);

struct FloquetReport {
  double expected_multiplier = 0.0;  ///< exp(-(lambda_p_omega + offset) omega)
  double measured_multiplier = 0.0;  ///< <P phi, phi> / <phi, phi>
  double measured_lambda_p_omega = 0.0;
  double relative_error = 0.0;       ///< ||P phi - expected phi|| / (expected ||phi||)
  bool passed = false;               ///< relative_error <= tolerance
};

/// Propagates phi through one period of the linear problem (f = (a + b) u)
/// and compares with the predicted Floquet multiplier.
FloquetReport verify_floquet(const SpectralResult& res, const DispersalOperator& op,
                             const SeasonClock& clock, const TimeProfile& a,
                             std::size_t substeps = 1024, double lambda_offset = 0.0,
                             double tolerance = 1e-6);

struct SweepRow {
  double R = 0.0;
  std::size_t n = 0;
  double lambda_p = std::numeric_limits<double>::quiet_NaN();
  double lambda_p_omega = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  double bound_lower = std::numeric_limits<double>::quiet_NaN();
  double bound_upper = std::numeric_limits<double>::quiet_NaN();
  bool h2_satisfied = false;
  std::string error;  ///< empty on success
};

struct SweepTable {
  std::vector<SweepRow> rows;
  /// Aitken extrapolation of the last three successful radii (or the last
  /// value when fewer than three succeeded).
  double lambda_p_limit = std::numeric_limits<double>::quiet_NaN();
  double lambda_p_omega_limit = std::numeric_limits<double>::quiet_NaN();
  /// Last finite difference of lambda_p, used as an error bar.
  double error_bar = std::numeric_limits<double>::quiet_NaN();
};

/// Growing-domain sweep on B_R(0) = [-R, R] in truncated mode with the cell
/// width h of the base grid kept fixed. Each radius is rounded to a whole
/// number of cells, n = 2 round(R / h), so consecutive grids are nested.
/// Requires increasing radii, each resolved by at least 64 cells. Per-radius
/// failures are recorded, not thrown.
SweepTable sweep_R(const ProblemSpec& base, const std::vector<double>& R_list,
                   double tol = kDefaultEigenTol, int max_iter = kDefaultEigenMaxIter);

}  // namespace sdisp
