#pragma once

#include "seasonal_dispersal/dispersal_operator.hpp"
#include "seasonal_dispersal/growth.hpp"
#include "seasonal_dispersal/grid.hpp"
#include "seasonal_dispersal/kernel.hpp"
#include "seasonal_dispersal/profile.hpp"
#include "seasonal_dispersal/season.hpp"

#include <optional>
#include <vector>

namespace sdisp {

struct GridSpec {
  double x_min = -10.0;
  double x_max = 10.0;
  std::size_t n = 201;
  BoundaryMode boundary = BoundaryMode::truncated;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::tent;
  double gamma = 1.0;
  /// Standard deviation for truncated_gaussian; 0 means gamma / 2.
  double sigma = 0.0;
  /// Samples over [-gamma, gamma] for the tabulated family.
  std::vector<double> samples;
};

struct OperatorSpec {
  double d = 1.0;
  bool normalize_rows = true;
};

/// Description of a(t) that can be realized against any season clock.
struct TimeProfileSpec {
  enum class Kind { constant, sine, table };
  Kind kind = Kind::constant;
  double value = 0.0;      ///< constant value, or sine mean
  double amplitude = 0.0;  ///< sine
  double cycles = 1.0;     ///< sine
  std::vector<double> values;  ///< table, uniform over the good season
};

struct GrowthSpec {
  GrowthFamily family = GrowthFamily::logistic;
  TimeProfileSpec a;
  SpatialProfile b = SpatialProfile::constant_value(1.0);
  double c_sat = 1.0;
  std::optional<double> K0;
  std::optional<double> K_lip;
};

/// Everything needed to assemble one seasonal problem.
struct ProblemSpec {
  GridSpec grid;
  KernelSpec kernel;
  OperatorSpec op;
  SeasonClock season = SeasonClock::make(2.0, 0.5, 0.5);
  GrowthSpec growth;
};

/// Initial population u0.
struct SeedSpec {
  enum class Kind { constant, gaussian, table };
  Kind kind = Kind::gaussian;
  double value = 0.5;      ///< constant
  double base = 0.1;       ///< gaussian: base + amplitude exp(-(x-center)^2 / (2 width^2))
  double amplitude = 0.5;
  double center = 0.0;
  double width = 1.0;
  std::vector<double> xs;      ///< table
  std::vector<double> values;  ///< table
};

struct Problem {
  SpatialGrid grid;
  Kernel kernel = Kernel::tent(1.0);
  DispersalOperator op;
  SeasonClock clock;
  GrowthModel model;
};

Kernel make_kernel(const KernelSpec& spec);
TimeProfile make_profile(const TimeProfileSpec& spec, const SeasonClock& clock);
GrowthModel make_growth(const GrowthSpec& spec, const SpatialGrid& grid,
                        const SeasonClock& clock);
Problem build_problem(const ProblemSpec& spec);
/// Throws InvalidArgument when the resulting field has negative entries.
Field make_initial(const SeedSpec& spec, const SpatialGrid& grid);

}  // namespace sdisp
