#pragma once

#include "seasonal_dispersal/dispersal_operator.hpp"
#include "seasonal_dispersal/growth.hpp"
#include "seasonal_dispersal/season.hpp"

#include <cstddef>
#include <vector>

namespace sdisp {

/// Snapshots of a simulation. times strictly increasing; states aligned.
struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<Season> seasons;

  std::size_t size() const { return times.size(); }
  const Field& back() const { return states.back(); }
};

/// Snapshot policy for simulate().
struct SavePolicy {
  enum class Kind { period_ends, every_substep, explicit_times };
  Kind kind = Kind::period_ends;
  std::vector<double> times;

  static SavePolicy period_ends() { return {Kind::period_ends, {}}; }
  static SavePolicy every_substep() { return {Kind::every_substep, {}}; }
  static SavePolicy at(std::vector<double> times) {
    return {Kind::explicit_times, std::move(times)};
  }
};

/// Bad-season flow in closed form: e^{-delta (t1 - t0)} u. Throws if
/// [t0, t1] is not inside a single bad season.
Field decay_season(const Field& u, const SeasonClock& clock, double t0, double t1);

/// One classical RK4 step of u' = d (W u - u) + f(t, u) over [t, t + dt],
/// which must lie inside one good season. Throws NumericalError on non-finite
/// output or a negative undershoot below -1e-9 ||u||_inf.
Field good_season_step(const Field& u, const DispersalOperator& op,
                       const GrowthModel& m, double t, double dt);

/// Same step addressed by good-season phase tau in [rho omega, omega].
Field rk4_step(const Field& u, const DispersalOperator& op, const GrowthModel& m,
               double tau, double dt);

/// Right-hand side d (W u - u) + f(tau, u).
Field good_season_rhs(const DispersalOperator& op, const GrowthModel& m, double tau,
                      const Field& u);

/// Smallest substep count with dt (2 d + K_lip) <= 0.5, at least 8.
std::size_t default_substeps(const DispersalOperator& op, const GrowthModel& m);

/// State at time omega from state u0 at time 0 (decay, then good season).
Field advance_period(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                     std::size_t substeps);

/// Integrates the seasonal problem over horizon_periods periods. The clock is
/// taken from the growth model. The initial state is always the first snapshot.
Trajectory simulate(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                    std::size_t horizon_periods, std::size_t substeps_per_good_season,
                    const SavePolicy& save = SavePolicy::period_ends());

/// Part metric: max_i |ln(v_i / u_i)|. Throws on nonpositive components.
double theta_metric(const Field& u, const Field& v);

struct OrderReport {
  double min_gap = 0.0;  ///< min over snapshots and nodes of hi - lo
  double scale = 1.0;    ///< max(1, sup |hi|)
  bool passed = true;    ///< min_gap >= -1e-10 scale
  double worst_time = 0.0;
  std::size_t worst_node = 0;
};

/// Compares two trajectories on identical snapshot times.
OrderReport check_order(const Trajectory& hi, const Trajectory& lo);

}  // namespace sdisp
