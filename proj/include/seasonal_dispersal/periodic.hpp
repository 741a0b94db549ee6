#pragma once

#include "seasonal_dispersal/dispersal_operator.hpp"
#include "seasonal_dispersal/growth.hpp"
#include "seasonal_dispersal/spectral.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace sdisp {

enum class PeriodicMethod { monotone, poincare };

std::string_view to_string(PeriodicMethod method);

/// One period [0, omega] of a time-periodic solution. Snapshots are taken at
/// 0, at the end of the bad season and after every good-season substep.
struct PeriodicOrbit {
  std::vector<double> times;
  std::vector<Field> states;
  /// ||U(., 0) - U(., omega)||_inf
  double periodicity_defect = 0.0;
  PeriodicMethod method = PeriodicMethod::monotone;
  int iterations = 0;

  /// Monotone method: ||U_k - U_{k-1}||_inf per sweep.
  /// Poincare method: sandwich gap ||upper - lower||_inf per period.
  std::vector<double> history;
  /// Monotone: min over sweeps, snapshots and nodes of U_k - U_{k-1}.
  /// Poincare: min over periods of the lower/upper monotonicity margins.
  double min_increment = 0.0;
  /// Largest value attained by any iterate.
  double max_value = 0.0;

  const Field& start() const { return states.front(); }
};

struct LowerSeed {
  Field seed;
  double eps = 0.0;
  int halvings = 0;
  /// Seed after one period of the nonlinear flow.
  Field propagated;
};

/// eps * phi_p(., 0), validated as a discrete lower solution: one period of
/// the flow must not decrease it (within -1e-10 ||seed||). eps defaults to
/// 1e-3 K0 / max phi and is halved up to 40 times until the check passes.
/// Throws ExtinctionRegime when lambda_p_omega >= 0.
LowerSeed lower_solution_seed(const SpectralResult& res, const DispersalOperator& op,
                              const GrowthModel& m, std::size_t substeps,
                              std::optional<double> eps = std::nullopt);

/// Monotone iteration: sweep k solves
///   U_k' = d L[U_k] - K U_k + f(t, U_{k-1}) + K U_{k-1}  on the good season,
///   U_k' = -delta U_k                                  on the bad season,
/// with U_k(0) = U_{k-1}(omega). U_0 is the one-period flow from the seed.
/// Each RK4 stage of sweep k freezes the forcing at the matching stage state
/// of sweep k - 1, so a fixed point of the sweep is exactly a fixed point of
/// the discrete period map used by poincare_fixed_point.
/// Stops when max over snapshots and nodes of |U_k - U_{k-1}| / U_k, inflated
/// by the geometric tail factor q / (1 - q) from the observed contraction q,
/// is <= tol. The node-wise relative test bounds the part metric as well as
/// the sup norm, which matters where the orbit is small near a boundary.
PeriodicOrbit monotone_iteration(const Field& seed_lower, const DispersalOperator& op,
                                 const GrowthModel& m, std::size_t substeps, double K_lip,
                                 double tol = 1e-8, int max_sweeps = 2000);

/// State at omega from state u0 at time 0.
Field poincare_map(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                   std::size_t substeps);

struct PoincareOptions {
  double tol = 1e-8;
  int max_periods = 5000;
  /// The upper seed is 1.5 max(K0, upper_bound).
  std::optional<double> upper_bound;
  std::optional<double> eps;
};

/// Iterates the period map from a lower seed eps phi_p and an upper seed M
/// until (upper - lower) / lower <= tol at every node.
PeriodicOrbit poincare_fixed_point(const DispersalOperator& op, const GrowthModel& m,
                                   const SpectralResult& res, std::size_t substeps,
                                   const PoincareOptions& options = {});

/// Reconstructs the orbit over [0, omega] from a period-start state.
PeriodicOrbit orbit_from_start(const Field& u0, const DispersalOperator& op,
                               const GrowthModel& m, std::size_t substeps);

/// Closed-form period-start value for the spatially constant orbit of the
/// logistic model with constant b (and a = 0) in wrap mode:
/// u* = b (m e^{bT} - 1) / (c m (e^{bT} - 1)) with m = e^{-delta rho omega},
/// T = (1 - rho) omega. Returns NaN when m e^{bT} <= 1.
double constant_orbit_value(const SeasonClock& clock, double b, double c_sat);

}  // namespace sdisp
