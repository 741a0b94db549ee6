#include "seasonal_dispersal/growth.hpp"

#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sdisp {

namespace {

constexpr int kLatticeTimes = 257;
constexpr double kK0Floor = 1e-6;
constexpr double kLipSafety = 1.1;

std::vector<double> good_season_lattice(const SeasonClock& clock, int count) {
  std::vector<double> taus(static_cast<std::size_t>(count));
  const double start = clock.bad_length();
  const double step = clock.good_length() / (count - 1);
  for (int k = 0; k < count; ++k) taus[static_cast<std::size_t>(k)] = start + k * step;
  taus.back() = clock.omega;
  return taus;
}

void check_b(const SpatialGrid& grid, const Field& b_raw) {
  if (b_raw.size() != static_cast<Eigen::Index>(grid.n))
    throw InvalidArgument("growth.b has wrong length for the grid");
  if (!b_raw.allFinite()) throw InvalidArgument("growth.b must be finite");
}

}  // namespace

std::string_view to_string(GrowthFamily family) {
  switch (family) {
    case GrowthFamily::logistic:
      return "logistic";
    case GrowthFamily::linear:
      return "linear";
    case GrowthFamily::custom:
      return "custom";
  }
  return "unknown";
}

GrowthFamily growth_family_from_string(std::string_view name) {
  if (name == "logistic") return GrowthFamily::logistic;
  if (name == "linear") return GrowthFamily::linear;
  if (name == "custom") return GrowthFamily::custom;
  throw InvalidArgument("unknown growth family '" + std::string(name) + "'");
}

double GrowthModel::rate(std::size_t i, double tau, double u) const {
  const auto idx = static_cast<Eigen::Index>(i);
  switch (family) {
    case GrowthFamily::logistic:
      return u * (a.at_phase(tau) + b[idx] - c_sat * u);
    case GrowthFamily::linear:
      return (a.at_phase(tau) + b[idx]) * u;
    case GrowthFamily::custom:
      return custom(i, tau, u);
  }
  return 0.0;
}

Field GrowthModel::rate(double tau, const Field& u) const {
  switch (family) {
    case GrowthFamily::logistic: {
      const double at = a.at_phase(tau);
      return (u.array() * ((b.array() + at) - c_sat * u.array())).matrix();
    }
    case GrowthFamily::linear: {
      const double at = a.at_phase(tau);
      return (u.array() * (b.array() + at)).matrix();
    }
    case GrowthFamily::custom: {
      Field out(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i)
        out[i] = custom(static_cast<std::size_t>(i), tau, u[i]);
      return out;
    }
  }
  return Field::Zero(u.size());
}

double good_season_mean(const TimeProfile& a, const SeasonClock& clock) {
  if (a.is_constant()) return a.at_phase(clock.omega);
  if (a.is_tabulated()) {
    // Trapezoid is exact for the linear interpolant.
    const auto& t = a.table();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) sum += 0.5 * (t[i] + t[i + 1]);
    return sum / static_cast<double>(t.size() - 1) + a.offset();
  }
  const double start = clock.bad_length();
  const double integral = converged_simpson(
      [&a](double tau) { return a.at_phase(tau); }, start, clock.omega, 1e-12);
  return integral / clock.good_length();
}

NormalizedAB normalize_ab(const TimeProfile& a_raw, const Field& b_raw,
                          const SeasonClock& clock) {
  if (!b_raw.allFinite()) throw InvalidArgument("normalize_ab: b has non-finite values");
  for (double tau : good_season_lattice(clock, 17))
    if (!std::isfinite(a_raw.at_phase(tau)))
      throw InvalidArgument("normalize_ab: a profile has non-finite values");
  const double a_bar = good_season_mean(a_raw, clock);
  if (!std::isfinite(a_bar)) throw InvalidArgument("normalize_ab: a profile mean is not finite");
  NormalizedAB out;
  out.a = a_raw.shifted(a_bar);
  out.b = b_raw.array() + a_bar;
  out.a_bar = a_bar;
  return out;
}

K0KlipResult default_K0_Klip(const GrowthModel& m, const SpatialGrid& grid,
                             const SeasonClock& clock) {
  if (m.family != GrowthFamily::logistic)
    throw InvalidArgument("default_K0_Klip applies to the logistic family only");
  (void)grid;
  const auto taus = good_season_lattice(clock, kLatticeTimes);
  double max_growth = -std::numeric_limits<double>::infinity();
  double min_growth = std::numeric_limits<double>::infinity();
  for (double tau : taus) {
    const double at = m.a.at_phase(tau);
    max_growth = std::max(max_growth, at + m.b.maxCoeff());
    min_growth = std::min(min_growth, at + m.b.minCoeff());
  }
  K0KlipResult r;
  r.K0 = max_growth / m.c_sat;
  if (r.K0 <= kK0Floor) {
    r.K0 = kK0Floor;
    r.floored = true;
  }
  // |df/du| = |a + b - 2 c u| is linear in u, so its maximum over [0, K0 + 1]
  // sits at an endpoint.
  const double top = 2.0 * m.c_sat * (r.K0 + 1.0);
  const double slope = std::max({std::abs(max_growth), std::abs(min_growth),
                                 std::abs(max_growth - top), std::abs(min_growth - top)});
  r.K_lip = kLipSafety * slope;
  return r;
}

GrowthModel make_logistic(const SpatialGrid& grid, const SeasonClock& clock,
                          const TimeProfile& a_raw, const Field& b_raw, double c_sat,
                          GrowthOverrides overrides) {
  check_b(grid, b_raw);
  if (!std::isfinite(c_sat) || c_sat <= 0.0)
    throw InvalidArgument("growth.c_sat must be positive");
  auto norm = normalize_ab(a_raw, b_raw, clock);
  GrowthModel m;
  m.family = GrowthFamily::logistic;
  m.clock = clock;
  m.a = std::move(norm.a);
  m.b = std::move(norm.b);
  m.a_bar = norm.a_bar;
  m.c_sat = c_sat;
  const auto defaults = default_K0_Klip(m, grid, clock);
  m.K0 = defaults.K0;
  m.K0_floored = defaults.floored;
  m.K_lip = defaults.K_lip;
  if (overrides.K0) {
    if (!(*overrides.K0 > 0.0)) throw InvalidArgument("growth.K0 must be positive");
    m.K0 = *overrides.K0;
    m.K0_floored = false;
  }
  if (overrides.K_lip) {
    if (!(*overrides.K_lip > 0.0)) throw InvalidArgument("growth.K_lip must be positive");
    m.K_lip = *overrides.K_lip;
  }
  return m;
}

GrowthModel make_linear(const SpatialGrid& grid, const SeasonClock& clock,
                        const TimeProfile& a_raw, const Field& b_raw) {
  check_b(grid, b_raw);
  auto norm = normalize_ab(a_raw, b_raw, clock);
  GrowthModel m;
  m.family = GrowthFamily::linear;
  m.clock = clock;
  m.a = std::move(norm.a);
  m.b = std::move(norm.b);
  m.a_bar = norm.a_bar;
  m.K0 = std::numeric_limits<double>::infinity();
  double slope = 0.0;
  for (double tau : good_season_lattice(clock, kLatticeTimes))
    slope = std::max(slope, (m.b.array() + m.a.at_phase(tau)).abs().maxCoeff());
  m.K_lip = kLipSafety * slope;
  return m;
}

GrowthModel make_custom(const SpatialGrid& grid, const SeasonClock& clock, GrowthFn f,
                        const TimeProfile& a_raw, const Field& b_raw, double K0,
                        double K_lip) {
  check_b(grid, b_raw);
  if (!f) throw InvalidArgument("custom growth callable is empty");
  if (!(K0 > 0.0) || !(K_lip > 0.0))
    throw InvalidArgument("custom growth needs positive K0 and K_lip");
  auto norm = normalize_ab(a_raw, b_raw, clock);
  GrowthModel m;
  m.family = GrowthFamily::custom;
  m.clock = clock;
  m.a = std::move(norm.a);
  m.b = std::move(norm.b);
  m.a_bar = norm.a_bar;
  m.K0 = K0;
  m.K_lip = K_lip;
  m.custom = std::move(f);
  return m;
}

double eval_f(const GrowthModel& m, std::size_t x_index, double t, double u) {
  if (x_index >= static_cast<std::size_t>(m.b.size()))
    throw InvalidArgument("eval_f: node index out of range");
  const double tau = m.clock.phase(t);
  // The closed left end (i + rho) omega belongs to the good season closure.
  if (tau < m.clock.bad_length() * (1.0 - 1e-12))
    throw InvalidArgument("eval_f: t lies in a bad season; f is only defined on good seasons");
  return m.rate(x_index, tau, u);
}

ConditionReport validate_conditions(const GrowthModel& m, const SpatialGrid& grid,
                                    const SeasonClock& clock, int samples) {
  if (samples < 10) throw InvalidArgument("validate_conditions requires samples >= 10");
  ConditionReport rep;
  rep.zero_at_origin.name = "f(x,t,0) = 0";
  rep.per_capita_decreasing.name = "f/u strictly decreasing in u";
  rep.lipschitz.name = "Lipschitz bound K_lip on [0, K0+1]";
  rep.saturation.name = "f <= 0 for u >= K0";

  std::vector<std::size_t> nodes;
  if (grid.n <= static_cast<std::size_t>(samples)) {
    for (std::size_t i = 0; i < grid.n; ++i) nodes.push_back(i);
  } else {
    for (int k = 0; k < samples; ++k)
      nodes.push_back(static_cast<std::size_t>(
          std::llround(static_cast<double>(k) * static_cast<double>(grid.n - 1) /
                       (samples - 1))));
  }
  const auto taus = good_season_lattice(clock, samples);
  const bool bounded = std::isfinite(m.K0);
  const double top = bounded ? m.K0 + 1.0 : 1.0;
  std::vector<double> levels(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k)
    levels[static_cast<std::size_t>(k)] = top * (k + 1) / samples;

  double worst_zero = 0.0;
  double worst_mono = -std::numeric_limits<double>::infinity();
  double worst_lip = 0.0;
  double worst_sat = -std::numeric_limits<double>::infinity();

  for (std::size_t i : nodes) {
    for (double tau : taus) {
      const double f0 = m.rate(i, tau, 0.0);
      if (std::abs(f0) > worst_zero) {
        worst_zero = std::abs(f0);
        rep.zero_at_origin.passed = false;
        rep.zero_at_origin.node = i;
        rep.zero_at_origin.t = tau;
        rep.zero_at_origin.value = f0;
      }
      double prev_u = levels[0];
      double prev_f = m.rate(i, tau, prev_u);
      for (std::size_t k = 1; k < levels.size(); ++k) {
        const double u = levels[k];
        const double f = m.rate(i, tau, u);
        // Increase of the per-capita rate; must be negative.
        const double mono = f / u - prev_f / prev_u;
        if (mono > worst_mono) {
          worst_mono = mono;
          rep.per_capita_decreasing.node = i;
          rep.per_capita_decreasing.t = tau;
          rep.per_capita_decreasing.u = u;
          rep.per_capita_decreasing.value = mono;
        }
        const double quotient = std::abs(f - prev_f) / (u - prev_u);
        if (quotient > worst_lip) {
          worst_lip = quotient;
          rep.lipschitz.node = i;
          rep.lipschitz.t = tau;
          rep.lipschitz.u = u;
          rep.lipschitz.value = quotient;
        }
        prev_u = u;
        prev_f = f;
      }
      if (bounded) {
        for (int k = 0; k < samples; ++k) {
          const double u = m.K0 + static_cast<double>(k) / (samples - 1);
          const double f = m.rate(i, tau, u);
          if (f > worst_sat) {
            worst_sat = f;
            rep.saturation.node = i;
            rep.saturation.t = tau;
            rep.saturation.u = u;
            rep.saturation.value = f;
          }
        }
      }
    }
  }

  rep.per_capita_decreasing.passed = worst_mono < 0.0;
  rep.lipschitz.passed = worst_lip <= m.K_lip;
  std::ostringstream lip;
  lip << "max quotient " << worst_lip << " vs K_lip " << m.K_lip;
  rep.lipschitz.detail = lip.str();
  if (bounded) {
    rep.saturation.passed = worst_sat <= 1e-12 * std::max(1.0, m.K0);
  } else {
    rep.saturation.passed = false;
    rep.saturation.detail = "no finite saturation level K0";
  }
  return rep;
}

}  // namespace sdisp
