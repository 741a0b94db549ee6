#include "seasonal_dispersal/evolve.hpp"

#include "seasonal_dispersal/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sdisp {

namespace {

constexpr double kUndershoot = 1e-9;

double time_slack(const SeasonClock& clock) { return 1e-12 * std::max(1.0, clock.omega); }

void check_state(const Field& next, double norm_before, double t) {
  if (!next.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state at t = " << t << " (step too large)";
    throw NumericalError(msg.str());
  }
  const double scale = std::max(norm_before, next.cwiseAbs().maxCoeff());
  if (next.size() > 0 && next.minCoeff() < -kUndershoot * scale) {
    std::ostringstream msg;
    msg << "negative undershoot " << next.minCoeff() << " at t = " << t << ": reduce dt";
    throw NumericalError(msg.str());
  }
}

// Integrates one good season from phase rho omega, recording every substep
// state through `visit(k, state)` (k = 1..substeps).
template <typename Visit>
Field integrate_good_season(Field u, const DispersalOperator& op, const GrowthModel& m,
                            std::size_t substeps, double period_start, Visit&& visit) {
  const auto& clock = m.clock;
  const double start = clock.bad_length();
  const double dt = clock.good_length() / static_cast<double>(substeps);
  for (std::size_t k = 0; k < substeps; ++k) {
    const double tau = start + static_cast<double>(k) * dt;
    Field next = rk4_step(u, op, m, tau, dt);
    check_state(next, u.cwiseAbs().maxCoeff(), period_start + tau + dt);
    u = std::move(next);
    visit(k + 1, u);
  }
  return u;
}

}  // namespace

Field decay_season(const Field& u, const SeasonClock& clock, double t0, double t1) {
  if (!(t1 >= t0)) throw InvalidArgument("decay_season requires t1 >= t0");
  if (t1 == t0) return u;
  const double slack = time_slack(clock);
  const double period_start = clock.omega * std::floor((t0 + slack) / clock.omega);
  if (t1 > period_start + clock.bad_length() + slack || t0 < period_start - slack)
    throw InvalidArgument("decay_season interval straddles a season boundary");
  return std::exp(-clock.delta * (t1 - t0)) * u;
}

Field good_season_rhs(const DispersalOperator& op, const GrowthModel& m, double tau,
                      const Field& u) {
  Field out = op.W * u;
  out -= u;
  out *= op.d;
  out += m.rate(tau, u);
  return out;
}

Field rk4_step(const Field& u, const DispersalOperator& op, const GrowthModel& m,
               double tau, double dt) {
  const Field k1 = good_season_rhs(op, m, tau, u);
  const Field k2 = good_season_rhs(op, m, tau + 0.5 * dt, u + 0.5 * dt * k1);
  const Field k3 = good_season_rhs(op, m, tau + 0.5 * dt, u + 0.5 * dt * k2);
  const Field k4 = good_season_rhs(op, m, tau + dt, u + dt * k3);
  return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Field good_season_step(const Field& u, const DispersalOperator& op,
                       const GrowthModel& m, double t, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("good_season_step requires dt > 0");
  if (u.size() != static_cast<Eigen::Index>(op.size()))
    throw InvalidArgument("good_season_step: field size does not match operator grid");
  const auto& clock = m.clock;
  const double slack = time_slack(clock);
  const double period_start = clock.omega * std::floor((t + slack) / clock.omega);
  const double tau = t - period_start;
  if (tau < clock.bad_length() - slack || tau + dt > clock.omega + slack)
    throw InvalidArgument("good_season_step: [t, t+dt] is not inside one good season");
  Field next = rk4_step(u, op, m, tau, dt);
  check_state(next, u.cwiseAbs().maxCoeff(), t + dt);
  return next;
}

std::size_t default_substeps(const DispersalOperator& op, const GrowthModel& m) {
  const double stiffness = 2.0 * op.d + m.K_lip;
  const auto n = static_cast<std::size_t>(std::ceil(m.clock.good_length() * stiffness / 0.5));
  return std::max<std::size_t>(n, 8);
}

Field advance_period(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                     std::size_t substeps) {
  if (substeps == 0) throw InvalidArgument("substeps must be positive");
  Field u = std::exp(-m.clock.delta * m.clock.bad_length()) * u0;
  return integrate_good_season(std::move(u), op, m, substeps, 0.0,
                               [](std::size_t, const Field&) {});
}

Trajectory simulate(const Field& u0, const DispersalOperator& op, const GrowthModel& m,
                    std::size_t horizon_periods, std::size_t substeps,
                    const SavePolicy& save) {
  if (u0.size() != static_cast<Eigen::Index>(op.size()))
    throw InvalidArgument("simulate: initial field size does not match operator grid");
  if (substeps < 8) throw InvalidArgument("simulate requires substeps >= 8");
  if (!u0.allFinite()) throw InvalidArgument("simulate: initial field must be finite");
  if (u0.size() > 0 && u0.minCoeff() < 0.0)
    throw InvalidArgument("simulate: initial field must be nonnegative");

  const auto& clock = m.clock;
  std::vector<double> wanted = save.times;
  if (save.kind == SavePolicy::Kind::explicit_times) {
    std::sort(wanted.begin(), wanted.end());
    for (double t : wanted)
      if (!(t >= 0.0) || t > clock.omega * static_cast<double>(horizon_periods) * (1 + 1e-12))
        throw InvalidArgument("simulate: requested snapshot time outside the horizon");
  }
  auto next_wanted = wanted.begin();
  const double slack = time_slack(clock);

  Trajectory traj;
  auto record = [&](double t, const Field& u) {
    if (!traj.times.empty() && t <= traj.times.back()) return;
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.seasons.push_back(clock.season_of(t));
  };
  record(0.0, u0);
  while (next_wanted != wanted.end() && *next_wanted <= slack) ++next_wanted;

  const double dt = clock.good_length() / static_cast<double>(substeps);
  Field u = u0;
  for (std::size_t i = 0; i < horizon_periods; ++i) {
    const double t0 = clock.omega * static_cast<double>(i);
    const double t_mid = t0 + clock.bad_length();
    const double t_end = clock.omega * static_cast<double>(i + 1);

    // Requested snapshots inside the bad season come from the closed form.
    while (next_wanted != wanted.end() && *next_wanted <= t_mid + slack) {
      const double t = std::min(*next_wanted, t_mid);
      record(*next_wanted, std::exp(-clock.delta * (t - t0)) * u);
      ++next_wanted;
    }
    u *= std::exp(-clock.delta * clock.bad_length());
    if (save.kind == SavePolicy::Kind::every_substep) record(t_mid, u);

    integrate_good_season(u, op, m, substeps, t0, [&](std::size_t k, const Field& state) {
      const double t_prev = t_mid + static_cast<double>(k - 1) * dt;
      const double t_k = k == substeps ? t_end : t_mid + static_cast<double>(k) * dt;
      // Explicit snapshots strictly inside the step get their own partial step
      // from the previous state; the main trajectory is unaffected.
      while (next_wanted != wanted.end() && *next_wanted < t_k - slack) {
        const double tau_prev = clock.bad_length() + static_cast<double>(k - 1) * dt;
        record(*next_wanted, rk4_step(u, op, m, tau_prev, *next_wanted - t_prev));
        ++next_wanted;
      }
      if (next_wanted != wanted.end() && *next_wanted <= t_k + slack) {
        record(*next_wanted, state);
        ++next_wanted;
      }
      if (save.kind == SavePolicy::Kind::every_substep) record(t_k, state);
      u = state;
    });
    if (save.kind == SavePolicy::Kind::period_ends) record(t_end, u);
  }
  return traj;
}

double theta_metric(const Field& u, const Field& v) {
  if (u.size() != v.size()) throw InvalidArgument("theta_metric: size mismatch");
  if (u.size() == 0) return 0.0;
  if (!(u.minCoeff() > 0.0) || !(v.minCoeff() > 0.0))
    throw InvalidArgument("theta_metric requires strictly positive fields");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i)
    worst = std::max(worst, std::abs(std::log(v[i] / u[i])));
  return worst;
}

OrderReport check_order(const Trajectory& hi, const Trajectory& lo) {
  if (hi.times.size() != lo.times.size())
    throw InvalidArgument("check_order: snapshot counts differ");
  OrderReport rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  double sup = 0.0;
  for (std::size_t s = 0; s < hi.times.size(); ++s) {
    if (std::abs(hi.times[s] - lo.times[s]) > 1e-12 * std::max(1.0, std::abs(hi.times[s])))
      throw InvalidArgument("check_order: snapshot times differ");
    const Field gap = hi.states[s] - lo.states[s];
    Eigen::Index node = 0;
    const double g = gap.size() ? gap.minCoeff(&node) : 0.0;
    if (g < rep.min_gap) {
      rep.min_gap = g;
      rep.worst_time = hi.times[s];
      rep.worst_node = static_cast<std::size_t>(node);
    }
    if (hi.states[s].size()) sup = std::max(sup, hi.states[s].cwiseAbs().maxCoeff());
  }
  if (hi.times.empty()) rep.min_gap = 0.0;
  rep.scale = std::max(1.0, sup);
  rep.passed = rep.min_gap >= -1e-10 * rep.scale;
  return rep;
}

}  // namespace sdisp
