#include "seasonal_dispersal/periodic.hpp"

#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace sdisp {

namespace {

constexpr int kMaxHalvings = 40;
constexpr double kSeedSlack = 1e-10;
constexpr double kMonotoneSlack = 1e-9;

double sup_norm(const Field& u) { return u.size() ? u.cwiseAbs().maxCoeff() : 0.0; }

// Iterate of the monotone scheme on the snapshot grid. Index 0 is t = 0,
// index 1 + k is phase rho omega + k dt (k = 0..substeps). stages[k] holds the
// RK4 stage states 2..4 of good-season step k (stage 1 is states[1 + k]).
struct Iterate {
  std::vector<Field> states;
  std::vector<std::array<Field, 3>> stages;
};

double snapshot_sup(const std::vector<Field>& states) {
  double top = 0.0;
  for (const auto& s : states) top = std::max(top, sup_norm(s));
  return top;
}

void require_persistence(const SpectralResult& res) {
  if (!(res.lambda_p_omega < 0.0)) {
    std::ostringstream msg;
    msg << "extinction regime: no positive periodic solution (lambda_p_omega = "
        << res.lambda_p_omega << " >= 0)";
    throw ExtinctionRegime(msg.str());
  }
}

}  // namespace

std::string_view to_string(PeriodicMethod method) {
  return method == PeriodicMethod::monotone ? "monotone" : "poincare";
}

Field poincare_map(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                   std::size_t substeps) {
  if (u0.size() != static_cast<Eigen::Index>(op.size()))
    throw InvalidArgument("poincare_map: field size does not match operator grid");
  if (u0.size() && u0.minCoeff() < 0.0)
    throw InvalidArgument("poincare_map: initial field must be nonnegative");
  return advance_period(u0, op, m, substeps);
}

LowerSeed lower_solution_seed(const SpectralResult& res, const DispersalOperator& op,
                              const GrowthModel& m, std::size_t substeps,
                              std::optional<double> eps) {
  if (std::isnan(res.lambda_p_omega))
    throw InvalidArgument("lower_solution_seed: spectral result lacks lambda_p_omega");
  require_persistence(res);
  const double phi_max = res.phi.maxCoeff();
  double e = eps ? *eps : 1e-3 * (std::isfinite(m.K0) ? m.K0 : 1.0) / phi_max;
  if (!(e > 0.0) || !std::isfinite(e))
    throw InvalidArgument("lower_solution_seed: eps must be positive");

  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings, e *= 0.5) {
    LowerSeed out;
    out.seed = e * res.phi;
    out.eps = e;
    out.halvings = halvings;
    out.propagated = poincare_map(out.seed, op, m, substeps);
    const double margin = (out.propagated - out.seed).minCoeff();
    if (margin >= -kSeedSlack * sup_norm(out.seed)) return out;
  }
  throw NumericalError("lower_solution_seed: eps * phi_p is not a lower solution after " +
                       std::to_string(kMaxHalvings) + " halvings");
}

PeriodicOrbit orbit_from_start(const Field& u0, const DispersalOperator& op,
                               const GrowthModel& m, std::size_t substeps) {
  const Trajectory traj = simulate(u0, op, m, 1, substeps, SavePolicy::every_substep());
  PeriodicOrbit orbit;
  orbit.times = traj.times;
  orbit.states = traj.states;
  orbit.periodicity_defect = (orbit.states.back() - orbit.states.front()).cwiseAbs().maxCoeff();
  orbit.max_value = snapshot_sup(orbit.states);
  return orbit;
}

PeriodicOrbit monotone_iteration(const Field& seed_lower, const DispersalOperator& op,
                                 const GrowthModel& m, std::size_t substeps, double K_lip,
                                 double tol, int max_sweeps) {
  if (!(K_lip > 0.0)) throw InvalidArgument("monotone_iteration: K_lip must be positive");
  if (!(tol > 0.0)) throw InvalidArgument("monotone_iteration: tol must be positive");
  if (seed_lower.size() != static_cast<Eigen::Index>(op.size()))
    throw InvalidArgument("monotone_iteration: seed size does not match operator grid");
  if (!(seed_lower.minCoeff() > 0.0))
    throw InvalidArgument("monotone_iteration: seed must be strictly positive");

  const auto& clock = m.clock;
  const double bad = clock.bad_length();
  const double dt = clock.good_length() / static_cast<double>(substeps);
  const double decay = std::exp(-clock.delta * bad);
  const std::size_t count = substeps + 2;
  auto phase_of = [&](std::size_t j) {
    return j == count - 1 ? clock.omega : bad + static_cast<double>(j - 1) * dt;
  };

  auto forcing = [&](double tau, const Field& frozen) -> Field {
    return m.rate(tau, frozen) + K_lip * frozen;
  };
  // Linear sweep right-hand side d L[u] - K u + g with g the frozen forcing.
  auto rhs = [&](const Field& u, const Field& g) -> Field {
    Field out = op.W * u;
    out -= u;
    out *= op.d;
    out -= K_lip * u;
    out += g;
    return out;
  };
  // One RK4 step whose stage derivatives come from `deriv(stage, tau, state)`;
  // records the stage states so the next sweep can freeze its forcing there.
  auto step = [&](const Field& u, double tau, std::array<Field, 3>& stages, auto&& deriv) {
    const Field k1 = deriv(0, tau, u);
    stages[0] = u + 0.5 * dt * k1;
    const Field k2 = deriv(1, tau + 0.5 * dt, stages[0]);
    stages[1] = u + 0.5 * dt * k2;
    const Field k3 = deriv(2, tau + 0.5 * dt, stages[1]);
    stages[2] = u + dt * k3;
    const Field k4 = deriv(3, tau + dt, stages[2]);
    return Field(u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };

  // U_0: one period of the nonlinear flow from the seed.
  Iterate prev;
  prev.states.resize(count);
  prev.stages.resize(substeps);
  prev.states[0] = seed_lower;
  prev.states[1] = decay * seed_lower;
  for (std::size_t k = 0; k < substeps; ++k) {
    prev.states[k + 2] = step(prev.states[k + 1], phase_of(k + 1), prev.stages[k],
                              [&](int, double tau, const Field& v) {
                                return good_season_rhs(op, m, tau, v);
                              });
  }
  if ((prev.states.back() - seed_lower).minCoeff() < -kSeedSlack * sup_norm(seed_lower))
    throw InvalidArgument("monotone_iteration: seed is not a lower solution "
                          "(one period of the flow decreases it)");

  PeriodicOrbit orbit;
  orbit.method = PeriodicMethod::monotone;
  orbit.times.resize(count);
  orbit.times[0] = 0.0;
  for (std::size_t j = 1; j < count; ++j) orbit.times[j] = phase_of(j);
  orbit.min_increment = std::numeric_limits<double>::infinity();
  orbit.max_value = snapshot_sup(prev.states);

  double prev_relative = 0.0;
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    Iterate next;
    next.states.resize(count);
    next.stages.resize(substeps);
    next.states[0] = prev.states[count - 1];
    next.states[1] = decay * next.states[0];
    for (std::size_t k = 0; k < substeps; ++k) {
      const auto& frozen = prev.stages[k];
      const Field& frozen_start = prev.states[k + 1];
      next.states[k + 2] =
          step(next.states[k + 1], phase_of(k + 1), next.stages[k],
               [&](int stage, double tau, const Field& v) {
                 return rhs(v, forcing(tau, stage == 0 ? frozen_start : frozen[stage - 1]));
               });
      if (!next.states[k + 2].allFinite())
        throw NumericalError("monotone_iteration: non-finite iterate (reduce dt)");
    }

    double increment = 0.0, relative = 0.0;
    double min_diff = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < count; ++j) {
      const Field diff = next.states[j] - prev.states[j];
      increment = std::max(increment, diff.cwiseAbs().maxCoeff());
      relative = std::max(relative, (diff.array() / next.states[j].array()).abs().maxCoeff());
      min_diff = std::min(min_diff, diff.minCoeff());
    }
    const double top = snapshot_sup(next.states);
    orbit.min_increment = std::min(orbit.min_increment, min_diff);
    orbit.max_value = std::max(orbit.max_value, top);
    orbit.history.push_back(increment);
    orbit.iterations = sweep;
    if (min_diff < -kMonotoneSlack * std::max(1.0, top)) {
      std::ostringstream msg;
      msg << "monotone_iteration: iterate decreased by " << -min_diff << " in sweep "
          << sweep << " (scheme inconsistency; reduce dt)";
      throw NumericalError(msg.str());
    }
    prev = std::move(next);
    // Geometric tail estimate of the distance to the limit, measured node by
    // node relative to the iterate; the sweep map contracts slowly when K_lip
    // dominates, so the increment alone overstates convergence.
    double tail = relative;
    if (prev_relative > 0.0) {
      const double q = std::min(relative / prev_relative, 0.999);
      tail = std::max(relative, relative * q / (1.0 - q));
    }
    prev_relative = relative;
    if (tail <= tol) {
      orbit.states = std::move(prev.states);
      orbit.periodicity_defect =
          (orbit.states.back() - orbit.states.front()).cwiseAbs().maxCoeff();
      return orbit;
    }
  }
  std::ostringstream msg;
  msg << "monotone_iteration did not converge within " << max_sweeps << " sweeps";
  throw NumericalError(msg.str());
}

PeriodicOrbit poincare_fixed_point(const DispersalOperator& op, const GrowthModel& m,
                                   const SpectralResult& res, std::size_t substeps,
                                   const PoincareOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidArgument("poincare_fixed_point: tol must be positive");
  require_persistence(res);
  if (!std::isfinite(m.K0))
    throw InvalidArgument("poincare_fixed_point needs a finite saturation level K0");

  Field lower = lower_solution_seed(res, op, m, substeps, options.eps).seed;
  const double M = 1.5 * std::max(m.K0, options.upper_bound.value_or(0.0));
  Field upper = Field::Constant(lower.size(), M);

  PeriodicOrbit out;
  out.method = PeriodicMethod::poincare;
  out.min_increment = std::numeric_limits<double>::infinity();
  double prev_gap = (upper - lower).cwiseAbs().maxCoeff();

  for (int period = 1; period <= options.max_periods; ++period) {
    Field next_lower = poincare_map(lower, op, m, substeps);
    Field next_upper = poincare_map(upper, op, m, substeps);
    const double scale = std::max(1.0, sup_norm(next_upper));
    const double rise = (next_lower - lower).minCoeff();
    const double fall = (upper - next_upper).minCoeff();
    out.min_increment = std::min({out.min_increment, rise, fall});
    if ((next_upper - next_lower).minCoeff() < -1e-10 * scale)
      throw NumericalError("poincare_fixed_point: sandwich ordering violated");
    if (rise < -1e-10 * scale || fall < -1e-10 * scale)
      throw NumericalError("poincare_fixed_point: seed iterates lost monotonicity");
    const double gap = (next_upper - next_lower).cwiseAbs().maxCoeff();
    if (gap > prev_gap + 1e-12 * scale)
      throw NumericalError("poincare_fixed_point: sandwich gap increased");
    out.history.push_back(gap);
    out.iterations = period;
    lower = std::move(next_lower);
    upper = std::move(next_upper);
    prev_gap = gap;
    // Converged once the sandwich is tight node by node; with lower <= U <=
    // upper this bounds Theta(midpoint, U) by about tol / 2.
    if (((upper - lower).array() / lower.array()).maxCoeff() <= options.tol) {
      PeriodicOrbit orbit = orbit_from_start(0.5 * (lower + upper), op, m, substeps);
      orbit.method = PeriodicMethod::poincare;
      orbit.iterations = out.iterations;
      orbit.history = std::move(out.history);
      orbit.min_increment = out.min_increment;
      return orbit;
    }
  }
  std::ostringstream msg;
  msg << "poincare_fixed_point did not converge within " << options.max_periods
      << " periods (gap " << prev_gap << ")";
  throw NumericalError(msg.str());
}

double constant_orbit_value(const SeasonClock& clock, double b, double c_sat) {
  const double m = std::exp(-clock.delta * clock.bad_length());
  const double growth = std::exp(b * clock.good_length());
  if (!(m * growth > 1.0)) return std::numeric_limits<double>::quiet_NaN();
  return b * (m * growth - 1.0) / (c_sat * m * (growth - 1.0));
}

}  // namespace sdisp
