#include "seasonal_dispersal/cli.hpp"

#include "seasonal_dispersal/classify.hpp"
#include "seasonal_dispersal/config.hpp"
#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/io.hpp"
#include "seasonal_dispersal/periodic.hpp"
#include "seasonal_dispersal/spectral.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace sdisp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

fs::path manifest_path(const RunConfig& cfg, const fs::path& out) {
  if (!cfg.output.manifest.empty()) return cfg.output.manifest;
  return fs::path(out.string() + ".manifest.json");
}

std::size_t substeps_for(const RunConfig& cfg, const Problem& p,
                         std::optional<std::size_t> flag = std::nullopt) {
  if (flag && *flag) return *flag;
  return cfg.solver.substeps ? cfg.solver.substeps : default_substeps(p.op, p.model);
}

// Closed-form orbit value when the run is the spatially constant logistic
// case in wrap mode; NaN otherwise.
double constant_case_value(const Problem& p) {
  const auto& m = p.model;
  const bool flat_b = m.b.size() && m.b.maxCoeff() == m.b.minCoeff();
  if (m.family != GrowthFamily::logistic || !flat_b || !m.a.is_constant() ||
      m.a.at_phase(p.clock.omega) != 0.0 || !p.op.rows_normalized)
    return std::numeric_limits<double>::quiet_NaN();
  return constant_orbit_value(p.clock, m.b[0], m.c_sat);
}

CsvTable orbit_table(const PeriodicOrbit& orbit, const SpatialGrid& grid) {
  CsvTable t{{"t", "node_index", "x", "U"}, {}};
  for (std::size_t j = 0; j < orbit.states.size(); ++j)
    for (std::size_t i = 0; i < grid.n; ++i)
      t.rows.push_back({orbit.times[j], static_cast<long long>(i), grid.nodes[i],
                        orbit.states[j][static_cast<Eigen::Index>(i)]});
  return t;
}

json orbit_summary(const PeriodicOrbit& orbit) {
  return {{"method", std::string(to_string(orbit.method))},
          {"iterations", orbit.iterations},
          {"defect", orbit.periodicity_defect},
          {"min_increment", finite_or_null(orbit.min_increment)},
          {"max_value", orbit.max_value}};
}

struct Context {
  std::ostream& out;
  std::ostream& err;
};

int run_simulate(const Context& ctx, const std::string& config, std::size_t periods,
                 std::size_t substeps_flag, const std::string& save, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  RunManifest manifest("simulate", cfg.echo);
  const Problem p = build_problem(cfg.problem);
  const Field u0 = make_initial(cfg.seed, p.grid);
  const std::size_t substeps = substeps_for(cfg, p, substeps_flag);
  manifest.mark_stage("setup");
  const Trajectory traj =
      simulate(u0, p.op, p.model, periods, substeps,
               save == "all" ? SavePolicy::every_substep() : SavePolicy::period_ends());
  manifest.mark_stage("simulate");
  CsvTable t{{"t", "season", "node_index", "x", "u"}, {}};
  for (std::size_t j = 0; j < traj.size(); ++j)
    for (std::size_t i = 0; i < p.grid.n; ++i)
      t.rows.push_back({traj.times[j], std::string(to_string(traj.seasons[j])),
                        static_cast<long long>(i), p.grid.nodes[i],
                        traj.states[j][static_cast<Eigen::Index>(i)]});
  manifest.add_file(out, write_csv(t, out));
  manifest.summary() = {{"periods", periods},
                        {"substeps", substeps},
                        {"snapshots", traj.size()},
                        {"final_sup", traj.back().maxCoeff()}};
  manifest.mark_stage("write");
  manifest.write(manifest_path(cfg, out));
  ctx.out << "simulate: " << traj.size() << " snapshots, final sup u = "
          << format_real(traj.back().maxCoeff()) << "\n";
  return kExitOk;
}

int run_eigen(const Context& ctx, const std::string& config, const std::vector<double>& radii,
              const fs::path& out) {
  const RunConfig cfg = load_config(config);
  RunManifest manifest("eigen", cfg.echo);
  CsvTable t{{"R", "lambda_p", "lambda_p_omega", "residual", "iterations", "bound_lo", "bound_hi"},
             {}};
  if (radii.empty()) {
    const Problem p = build_problem(cfg.problem);
    const SpectralResult r = principal_eigen(p.op, p.model.b, p.clock, cfg.solver.eigen_tol,
                                             cfg.solver.eigen_max_iter);
    manifest.mark_stage("eigen");
    t.rows.push_back({std::string("domain"), r.lambda_p, r.lambda_p_omega, r.residual,
                      static_cast<long long>(r.iterations), r.bound_lower, r.bound_upper});
    manifest.summary() = {{"lambda_p", r.lambda_p},
                          {"lambda_p_omega", r.lambda_p_omega},
                          {"h2_satisfied", r.h2.satisfied}};
    ctx.out << "eigen: lambda_p = " << format_real(r.lambda_p)
            << ", lambda_p_omega = " << format_real(r.lambda_p_omega) << "\n";
  } else {
    const SweepTable sweep =
        sweep_R(cfg.problem, radii, cfg.solver.eigen_tol, cfg.solver.eigen_max_iter);
    manifest.mark_stage("sweep");
    json failures = json::array();
    for (const auto& row : sweep.rows) {
      t.rows.push_back({row.R, row.lambda_p, row.lambda_p_omega, row.residual,
                        static_cast<long long>(row.iterations), row.bound_lower,
                        row.bound_upper});
      if (!row.error.empty()) failures.push_back({{"R", row.R}, {"error", row.error}});
    }
    manifest.summary() = {{"lambda_p_limit", finite_or_null(sweep.lambda_p_limit)},
                          {"lambda_p_omega_limit", finite_or_null(sweep.lambda_p_omega_limit)},
                          {"error_bar", finite_or_null(sweep.error_bar)},
                          {"failures", failures}};
    for (const auto& f : failures)
      ctx.err << "eigen: R = " << f["R"] << " failed: " << f["error"].get<std::string>() << "\n";
    ctx.out << "eigen: " << sweep.rows.size() << " radii, lambda_p limit ~ "
            << format_real(sweep.lambda_p_limit) << "\n";
  }
  manifest.add_file(out, write_csv(t, out));
  manifest.mark_stage("write");
  manifest.write(manifest_path(cfg, out));
  return kExitOk;
}

int run_periodic(const Context& ctx, const std::string& config, const std::string& method,
                 std::optional<double> tol_flag, const fs::path& out, fs::path summary_path) {
  const RunConfig cfg = load_config(config);
  RunManifest manifest("periodic", cfg.echo);
  const Problem p = build_problem(cfg.problem);
  const std::size_t substeps = substeps_for(cfg, p);
  const double tol = tol_flag.value_or(cfg.solver.periodic_tol);
  if (!(tol > 0.0)) throw InvalidArgument("--tol must be positive");
  const SpectralResult eig = principal_eigen(p.op, p.model.b, p.clock, cfg.solver.eigen_tol,
                                             cfg.solver.eigen_max_iter);
  manifest.mark_stage("eigen");

  std::optional<PeriodicOrbit> mono, poin;
  if (method == "monotone" || method == "both") {
    const LowerSeed seed = lower_solution_seed(eig, p.op, p.model, substeps);
    mono = monotone_iteration(seed.seed, p.op, p.model, substeps, p.model.K_lip, tol,
                              cfg.solver.max_sweeps);
    manifest.mark_stage("monotone");
  }
  if (method == "poincare" || method == "both") {
    PoincareOptions opt;
    opt.tol = tol;
    opt.max_periods = cfg.solver.max_periods;
    opt.upper_bound = make_initial(cfg.seed, p.grid).maxCoeff();
    poin = poincare_fixed_point(p.op, p.model, eig, substeps, opt);
    manifest.mark_stage("poincare");
  }
  const PeriodicOrbit& primary = mono ? *mono : *poin;

  json summary;
  if (mono && poin) {
    summary["method"] = "both";
    summary["iterations"] = {{"monotone", mono->iterations}, {"poincare", poin->iterations}};
    summary["defect"] = {{"monotone", mono->periodicity_defect},
                         {"poincare", poin->periodicity_defect}};
    summary["cross_method_difference"] = (mono->start() - poin->start()).cwiseAbs().maxCoeff();
    summary["details"] = {orbit_summary(*mono), orbit_summary(*poin)};
  } else {
    summary = orbit_summary(primary);
  }
  summary["u_star_if_constant"] = finite_or_null(constant_case_value(p));
  summary["lambda_p_omega"] = eig.lambda_p_omega;
  summary["substeps"] = substeps;
  summary["tol"] = tol;

  manifest.add_file(out, write_csv(orbit_table(primary, p.grid), out));
  if (summary_path.empty()) summary_path = fs::path(out).replace_extension(".summary.json");
  manifest.add_file(summary_path, write_text(summary.dump(2) + "\n", summary_path));
  manifest.summary() = summary;
  manifest.mark_stage("write");
  manifest.write(manifest_path(cfg, out));
  ctx.out << "periodic: " << summary["method"].get<std::string>() << ", max U(0) = "
          << format_real(primary.start().maxCoeff()) << "\n";
  return kExitOk;
}

int run_classify(const Context& ctx, const std::string& config, std::size_t periods_flag,
                 const fs::path& out) {
  const RunConfig cfg = load_config(config);
  RunManifest manifest("classify", cfg.echo);
  const Problem p = build_problem(cfg.problem);
  const Field u0 = make_initial(cfg.seed, p.grid);
  ClassifyOptions opt;
  opt.periods = periods_flag ? periods_flag : cfg.solver.periods;
  opt.extinct_threshold = cfg.solver.extinct_threshold;
  opt.margin = cfg.solver.margin;
  opt.substeps = cfg.solver.substeps;
  opt.periodic_tol = cfg.solver.periodic_tol;
  opt.max_periods = cfg.solver.max_periods;
  opt.eigen_tol = cfg.solver.eigen_tol;
  opt.eigen_max_iter = cfg.solver.eigen_max_iter;
  const DichotomyVerdict v = classify_run(p, u0, opt);
  manifest.mark_stage("classify");
  const DecayRateReport rate = decay_rate_check(v, p.clock);

  json doc = {{"lambda_p", v.lambda_p},
              {"lambda_p_omega", v.lambda_p_omega},
              {"predicted", std::string(to_string(v.predicted))},
              {"observed", std::string(to_string(v.observed))},
              {"agrees", v.agrees()},
              {"per_period_ratio", finite_or_null(v.per_period_ratio)},
              {"theta_to_orbit", finite_or_null(v.theta_to_orbit)},
              {"degenerate_input", v.degenerate_input},
              {"periods", opt.periods},
              {"sup_history", v.sup_history},
              {"decay_rate_check",
               {{"skipped", rate.skipped},
                {"passed", rate.passed},
                {"linear_rate", rate.linear_rate},
                {"bound", rate.bound}}}};
  json theta = json::array();
  for (double x : v.theta_history) theta.push_back(finite_or_null(x));
  doc["theta_history"] = theta;
  if (!v.orbit_error.empty()) doc["orbit_error"] = v.orbit_error;

  manifest.add_file(out, write_text(doc.dump(2) + "\n", out));
  manifest.summary() = {{"predicted", doc["predicted"]}, {"observed", doc["observed"]}};
  manifest.mark_stage("write");
  manifest.write(manifest_path(cfg, out));
  ctx.out << "classify: lambda_p_omega = " << format_real(v.lambda_p_omega) << ", predicted "
          << to_string(v.predicted) << ", observed " << to_string(v.observed) << "\n";
  return kExitOk;
}

int run_sweep(const Context& ctx, const std::string& config, const std::vector<double>& deltas,
              const std::vector<double>& rhos, std::size_t periods_flag, const fs::path& out) {
  const RunConfig cfg = load_config(config);
  RunManifest manifest("sweep", cfg.echo);
  ClassifyOptions opt;
  opt.periods = periods_flag ? periods_flag : cfg.solver.periods;
  opt.extinct_threshold = cfg.solver.extinct_threshold;
  opt.margin = cfg.solver.margin;
  opt.substeps = cfg.solver.substeps;
  opt.periodic_tol = cfg.solver.periodic_tol;
  opt.max_periods = cfg.solver.max_periods;
  opt.eigen_tol = cfg.solver.eigen_tol;
  opt.eigen_max_iter = cfg.solver.eigen_max_iter;
  opt.floquet_substeps = cfg.solver.floquet_substeps;
  const auto rows = dichotomy_grid(cfg.problem, cfg.seed, deltas, rhos, opt);
  manifest.mark_stage("sweep");
  CsvTable t{{"delta", "rho", "lambda_p_omega", "lambda_p_omega_floquet", "predicted",
              "observed", "agree", "per_period_ratio", "theta_to_orbit", "error"},
             {}};
  std::size_t disagreements = 0;
  for (const auto& r : rows) {
    t.rows.push_back({r.delta, r.rho, r.lambda_p_omega, r.lambda_p_omega_floquet,
                      std::string(to_string(r.predicted)), std::string(to_string(r.observed)),
                      static_cast<long long>(r.agree), r.per_period_ratio, r.theta_to_orbit,
                      r.error});
    if (!r.agree) ++disagreements;
  }
  manifest.add_file(out, write_csv(t, out));
  manifest.summary() = {{"cells", rows.size()}, {"disagreements", disagreements}};
  manifest.mark_stage("write");
  manifest.write(manifest_path(cfg, out));
  ctx.out << "sweep: " << rows.size() << " cells, " << disagreements << " disagreements\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Seasonal nonlocal dispersal: simulation, spectra, periodic orbits", "sdisp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", artifact_version());

  std::string config, save = "period_ends", method = "both";
  std::string out_path, summary_path;
  std::size_t periods = 0, substeps = 0;
  std::optional<double> tol;
  std::vector<double> radii, deltas, rhos;

  auto* sim = app.add_subcommand("simulate", "Integrate the seasonal problem");
  sim->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  sim->add_option("--periods", periods, "Number of periods")->default_val(10)->check(CLI::PositiveNumber);
  sim->add_option("--substeps", substeps, "Good-season substeps (0 = automatic)")->default_val(0);
  sim->add_option("--save", save, "Snapshot policy")
      ->check(CLI::IsMember({"period_ends", "all"}))
      ->default_val("period_ends");
  sim->add_option("--out", out_path, "CSV output")->required();

  auto* eig = app.add_subcommand("eigen", "Principal eigenvalue, optionally over growing domains");
  eig->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  eig->add_option("--sweep-R", radii, "Increasing radii r1,r2,...")->delimiter(',');
  eig->add_option("--out", out_path, "CSV output")->required();

  auto* per = app.add_subcommand("periodic", "Positive time-periodic solution");
  per->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  per->add_option("--method", method, "monotone, poincare or both")
      ->check(CLI::IsMember({"monotone", "poincare", "both"}))
      ->default_val("both");
  per->add_option("--tol", tol, "Convergence tolerance");
  per->add_option("--out", out_path, "CSV output")->required();
  per->add_option("--summary", summary_path, "Summary JSON (default: <out>.summary.json)");

  auto* cls = app.add_subcommand("classify", "Extinction or persistence by long simulation");
  cls->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  cls->add_option("--periods", periods, "Number of periods (>= 50)")->default_val(0);
  cls->add_option("--out", out_path, "JSON output")->required();

  auto* swp = app.add_subcommand("sweep", "Dichotomy grid over (delta, rho)");
  swp->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  swp->add_option("--delta", deltas, "delta values a,b,c")->required()->delimiter(',');
  swp->add_option("--rho", rhos, "rho values x,y,z")->required()->delimiter(',');
  swp->add_option("--periods", periods, "Periods per cell (>= 50)")->default_val(0);
  swp->add_option("--out", out_path, "CSV output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    err << app.help();
    return kExitUsage;
  }

  const Context ctx{out, err};
  try {
    if (*sim) return run_simulate(ctx, config, periods, substeps, save, out_path);
    if (*eig) return run_eigen(ctx, config, radii, out_path);
    if (*per) return run_periodic(ctx, config, method, tol, out_path, summary_path);
    if (*cls) return run_classify(ctx, config, periods, out_path);
    if (*swp) return run_sweep(ctx, config, deltas, rhos, periods, out_path);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return e.hypothesis_violation() ? kExitHypothesis : kExitUsage;
  } catch (const HypothesisViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  err << app.help();
  return kExitUsage;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace sdisp
