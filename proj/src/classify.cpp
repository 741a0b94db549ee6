#include "seasonal_dispersal/classify.hpp"

#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/parallel.hpp"

#include <cmath>
#include <limits>

namespace sdisp {

namespace {

constexpr std::size_t kTail = 10;
constexpr std::size_t kPersistTail = 3;
constexpr double kPersistTheta = 1e-4;
constexpr double kRatioFloor = 1e-250;

Prediction predict(double lambda_omega, double margin) {
  if (lambda_omega >= margin) return Prediction::extinction;
  if (lambda_omega <= -margin) return Prediction::persistence;
  return Prediction::marginal;
}

double safe_theta(const Field& u, const Field& v) {
  if (!(u.minCoeff() > 0.0) || !(v.minCoeff() > 0.0))
    return std::numeric_limits<double>::infinity();
  return theta_metric(u, v);
}

}  // namespace

std::string_view to_string(Prediction p) {
  switch (p) {
    case Prediction::extinction: return "extinction";
    case Prediction::persistence: return "persistence";
    case Prediction::marginal: return "marginal";
  }
  return "unknown";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::extinct: return "extinct";
    case Outcome::persistent: return "persistent";
    case Outcome::undecided: return "undecided";
  }
  return "unknown";
}

bool DichotomyVerdict::agrees() const {
  switch (predicted) {
    case Prediction::extinction: return observed == Outcome::extinct;
    case Prediction::persistence: return observed == Outcome::persistent;
    case Prediction::marginal: return true;
  }
  return false;
}

DichotomyVerdict classify_run(const Problem& problem, const Field& u0,
                              const ClassifyOptions& options) {
  if (options.periods < 50) throw InvalidArgument("classify_run requires periods >= 50");
  if (!(options.extinct_threshold > 0.0))
    throw InvalidArgument("classify_run: extinct_threshold must be positive");
  if (!(options.margin >= 0.0)) throw InvalidArgument("classify_run: margin must be >= 0");
  if (u0.size() != static_cast<Eigen::Index>(problem.op.size()))
    throw InvalidArgument("classify_run: initial data size does not match the grid");
  if (!u0.allFinite() || u0.minCoeff() < 0.0)
    throw InvalidArgument("classify_run: initial data must be finite and nonnegative");

  const GrowthModel& m = problem.model;
  const std::size_t substeps =
      options.substeps ? options.substeps : default_substeps(problem.op, m);

  DichotomyVerdict v;
  const SpectralResult spec =
      principal_eigen(problem.op, m.b, problem.clock, options.eigen_tol, options.eigen_max_iter);
  v.lambda_p = spec.lambda_p;
  v.lambda_p_omega = spec.lambda_p_omega;
  v.predicted = predict(v.lambda_p_omega, options.margin);

  const double sup0 = u0.cwiseAbs().maxCoeff();
  if (sup0 == 0.0) {
    v.degenerate_input = true;
    v.observed = Outcome::extinct;
    v.per_period_ratio = 0.0;
    v.sup_history.assign(options.periods + 1, 0.0);
    v.final_state = u0;
    return v;
  }

  const Trajectory traj = simulate(u0, problem.op, m, options.periods, substeps);
  for (const auto& s : traj.states) v.sup_history.push_back(s.cwiseAbs().maxCoeff());
  v.final_state = traj.back();

  // Fast extinction can drive sup u into the subnormal range or to zero
  // before period P. The tail window then ends at the last well-scaled
  // period end, where ratios are still accurate to full precision.
  const std::size_t P = options.periods;
  std::size_t last = P;
  while (last > kTail && !(v.sup_history[last] > kRatioFloor)) --last;
  double log_sum = 0.0;
  bool tail_decreasing = true;
  for (std::size_t i = last - kTail; i < last; ++i) {
    log_sum += std::log(v.sup_history[i + 1] / v.sup_history[i]);
    if (!(v.sup_history[i + 1] < v.sup_history[i])) tail_decreasing = false;
  }
  v.per_period_ratio = std::exp(log_sum / static_cast<double>(kTail));

  if (v.lambda_p_omega < 0.0) {
    try {
      PoincareOptions po;
      po.tol = options.periodic_tol;
      po.max_periods = options.max_periods;
      const PeriodicOrbit orbit = poincare_fixed_point(problem.op, m, spec, substeps, po);
      v.orbit_start = orbit.start();
      for (const auto& s : traj.states) v.theta_history.push_back(safe_theta(s, *v.orbit_start));
      v.theta_to_orbit = v.theta_history.back();
    } catch (const Error& e) {
      v.orbit_error = e.what();
    }
  }

  if (v.sup_history[P] < options.extinct_threshold * sup0 && tail_decreasing) {
    v.observed = Outcome::extinct;
  } else if (!v.theta_history.empty()) {
    bool close = true;
    for (std::size_t i = P + 1 - kPersistTail; i <= P; ++i)
      close = close && v.theta_history[i] < kPersistTheta;
    v.observed = close ? Outcome::persistent : Outcome::undecided;
  }
  return v;
}

DecayRateReport decay_rate_check(const DichotomyVerdict& verdict, const SeasonClock& clock,
                                 double slack) {
  DecayRateReport r;
  r.ratio = verdict.per_period_ratio;
  r.linear_rate = std::exp(-verdict.lambda_p_omega * clock.omega);
  r.bound = r.linear_rate + slack;
  if (verdict.predicted != Prediction::extinction || verdict.observed != Outcome::extinct ||
      verdict.degenerate_input)
    return r;
  r.skipped = false;
  r.passed = r.ratio <= r.bound;
  return r;
}

std::vector<DichotomyRow> dichotomy_grid(const ProblemSpec& tmpl, const SeedSpec& seed,
                                         const std::vector<double>& deltas,
                                         const std::vector<double>& rhos,
                                         const ClassifyOptions& options) {
  if (deltas.size() < 2 || rhos.size() < 2)
    throw InvalidArgument("dichotomy_grid requires at least a 2x2 grid");
  std::vector<DichotomyRow> rows(deltas.size() * rhos.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    DichotomyRow& row = rows[idx];
    row.delta = deltas[idx / rhos.size()];
    row.rho = rhos[idx % rhos.size()];
    try {
      ProblemSpec spec = tmpl;
      spec.season = SeasonClock::make(tmpl.season.omega, row.rho, row.delta);
      const Problem problem = build_problem(spec);
      const Field u0 = make_initial(seed, problem.grid);
      const DichotomyVerdict v = classify_run(problem, u0, options);
      row.lambda_p_omega = v.lambda_p_omega;
      row.predicted = v.predicted;
      row.observed = v.observed;
      row.per_period_ratio = v.per_period_ratio;
      row.theta_to_orbit = v.theta_to_orbit;
      row.agree = v.agrees();
      if (!v.orbit_error.empty()) row.error = v.orbit_error;

      const SpectralResult eig = principal_eigen(problem.op, problem.model.b, problem.clock,
                                                 options.eigen_tol, options.eigen_max_iter);
      const FloquetReport fl = verify_floquet(eig, problem.op, problem.clock,
                                              problem.model.a, options.floquet_substeps);
      row.lambda_p_omega_floquet = fl.measured_lambda_p_omega;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.agree = false;
    }
  });
  return rows;
}

}  // namespace sdisp
