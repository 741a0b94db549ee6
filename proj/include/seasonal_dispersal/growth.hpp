#pragma once

#include "seasonal_dispersal/grid.hpp"
#include "seasonal_dispersal/profile.hpp"
#include "seasonal_dispersal/season.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sdisp {

enum class GrowthFamily {
  logistic,  ///< f = u (a(t) + b(x) - c_sat u)
  linear,    ///< f = (a(t) + b(x)) u
  custom,    ///< user callable
};

std::string_view to_string(GrowthFamily family);
GrowthFamily growth_family_from_string(std::string_view name);

/// f(node index, phase, u) for custom growth laws.
using GrowthFn = std::function<double(std::size_t, double, double)>;

/// Good-season growth nonlinearity with linearization f_u(x, t, 0) = a(t) + b(x).
/// The stored (a, b) pair is normalized so that the good-season mean of a is 0.
struct GrowthModel {
  GrowthFamily family = GrowthFamily::logistic;
  SeasonClock clock;
  TimeProfile a = TimeProfile::constant(0.0);
  Field b;
  /// Good-season mean removed from the raw a profile.
  double a_bar = 0.0;
  double c_sat = 1.0;
  double K0 = 1.0;
  double K_lip = 1.0;
  /// Set when a + b is never positive (the default K0 floor was applied).
  bool K0_floored = false;
  GrowthFn custom;

  /// f at node i and good-season phase tau.
  double rate(std::size_t i, double tau, double u) const;
  /// f evaluated componentwise at phase tau.
  Field rate(double tau, const Field& u) const;
};

struct NormalizedAB {
  TimeProfile a;
  Field b;
  double a_bar = 0.0;
};

/// Removes the good-season mean of a_raw and adds it to b_raw; a + b unchanged.
NormalizedAB normalize_ab(const TimeProfile& a_raw, const Field& b_raw,
                          const SeasonClock& clock);

/// Good-season mean of a profile (exact for tabulated profiles, converged
/// composite Simpson otherwise).
double good_season_mean(const TimeProfile& a, const SeasonClock& clock);

struct GrowthOverrides {
  std::optional<double> K0;
  std::optional<double> K_lip;
};

GrowthModel make_logistic(const SpatialGrid& grid, const SeasonClock& clock,
                          const TimeProfile& a_raw, const Field& b_raw, double c_sat,
                          GrowthOverrides overrides = {});
GrowthModel make_linear(const SpatialGrid& grid, const SeasonClock& clock,
                        const TimeProfile& a_raw, const Field& b_raw);
/// Custom f; (a_raw, b_raw) describe its linearization at u = 0.
GrowthModel make_custom(const SpatialGrid& grid, const SeasonClock& clock, GrowthFn f,
                        const TimeProfile& a_raw, const Field& b_raw, double K0,
                        double K_lip);

/// Throws InvalidArgument if t is not in the closure of a good season.
double eval_f(const GrowthModel& m, std::size_t x_index, double t, double u);

struct K0KlipResult {
  double K0 = 0.0;
  double K_lip = 0.0;
  bool floored = false;
};

/// Defaults for the logistic family from a node x time x u lattice.
K0KlipResult default_K0_Klip(const GrowthModel& m, const SpatialGrid& grid,
                             const SeasonClock& clock);

struct ConditionCheck {
  std::string name;
  bool passed = true;
  /// Worst witness found; meaningful when the check has at least one sample.
  std::size_t node = 0;
  double t = 0.0;
  double u = 0.0;
  double value = 0.0;
  std::string detail;
};

struct ConditionReport {
  ConditionCheck zero_at_origin;     ///< f(x, t, 0) = 0
  ConditionCheck per_capita_decreasing;  ///< f/u strictly decreasing in u
  ConditionCheck lipschitz;          ///< |f(u1) - f(u2)| <= K_lip |u1 - u2| on [0, K0 + 1]
  ConditionCheck saturation;         ///< f <= 0 for u >= K0
  bool all_passed() const {
    return zero_at_origin.passed && per_capita_decreasing.passed && lipschitz.passed &&
           saturation.passed;
  }
};

/// Sample-based spot checks of the structural growth conditions. Requires
/// samples >= 10.
ConditionReport validate_conditions(const GrowthModel& m, const SpatialGrid& grid,
                                    const SeasonClock& clock, int samples);

}  // namespace sdisp
