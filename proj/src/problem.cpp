#include "seasonal_dispersal/problem.hpp"

#include "seasonal_dispersal/errors.hpp"

namespace sdisp {

Kernel make_kernel(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::tent:
      return Kernel::tent(spec.gamma);
    case KernelFamily::epanechnikov:
      return Kernel::epanechnikov(spec.gamma);
    case KernelFamily::truncated_gaussian:
      return Kernel::truncated_gaussian(spec.gamma,
                                        spec.sigma > 0.0 ? spec.sigma : 0.5 * spec.gamma);
    case KernelFamily::tabulated:
      return Kernel::tabulated(spec.gamma, spec.samples);
  }
  throw InvalidArgument("unknown kernel family");
}

TimeProfile make_profile(const TimeProfileSpec& spec, const SeasonClock& clock) {
  switch (spec.kind) {
    case TimeProfileSpec::Kind::constant:
      return TimeProfile::constant(spec.value);
    case TimeProfileSpec::Kind::sine:
      return TimeProfile::sine(spec.value, spec.amplitude, clock, spec.cycles);
    case TimeProfileSpec::Kind::table:
      return TimeProfile::tabulated(spec.values, clock);
  }
  throw InvalidArgument("unknown time profile kind");
}

GrowthModel make_growth(const GrowthSpec& spec, const SpatialGrid& grid,
                        const SeasonClock& clock) {
  const TimeProfile a = make_profile(spec.a, clock);
  const Field b = sample(grid, spec.b);
  switch (spec.family) {
    case GrowthFamily::logistic:
      return make_logistic(grid, clock, a, b, spec.c_sat, {spec.K0, spec.K_lip});
    case GrowthFamily::linear:
      return make_linear(grid, clock, a, b);
    case GrowthFamily::custom:
      break;
  }
  throw InvalidArgument("custom growth laws cannot be built from a specification");
}

Problem build_problem(const ProblemSpec& spec) {
  Problem p;
  p.grid = build_grid(spec.grid.x_min, spec.grid.x_max, spec.grid.n, spec.grid.boundary);
  p.kernel = make_kernel(spec.kernel);
  p.op = assemble_operator(p.grid, p.kernel, spec.op.d, spec.op.normalize_rows);
  p.clock = SeasonClock::make(spec.season.omega, spec.season.rho, spec.season.delta);
  p.model = make_growth(spec.growth, p.grid, p.clock);
  return p;
}

Field make_initial(const SeedSpec& spec, const SpatialGrid& grid) {
  SpatialProfile profile;
  switch (spec.kind) {
    case SeedSpec::Kind::constant:
      profile = SpatialProfile::constant_value(spec.value);
      break;
    case SeedSpec::Kind::gaussian:
      profile = SpatialProfile::gaussian(spec.base, spec.amplitude, spec.center, spec.width);
      break;
    case SeedSpec::Kind::table:
      profile = SpatialProfile::table(spec.xs, spec.values);
      break;
  }
  Field u0 = sample(grid, profile);
  if (!u0.allFinite() || u0.minCoeff() < 0.0)
    throw InvalidArgument("initial data must be finite and nonnegative");
  return u0;
}

}  // namespace sdisp
