#include "seasonal_dispersal/classify.hpp"
#include "seasonal_dispersal/cli.hpp"
#include "seasonal_dispersal/config.hpp"
#include "seasonal_dispersal/errors.hpp"
#include "seasonal_dispersal/evolve.hpp"
#include "seasonal_dispersal/io.hpp"
#include "seasonal_dispersal/periodic.hpp"
#include "seasonal_dispersal/spectral.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace sdisp;

namespace {

// A validated configuration together with its assembled problem.
struct Model {
  RunConfig config;
  Problem problem;

  explicit Model(RunConfig cfg) : config(std::move(cfg)), problem(build_problem(config.problem)) {}

  std::size_t substeps(std::size_t requested = 0) const {
    if (requested) return requested;
    if (config.solver.substeps) return config.solver.substeps;
    return default_substeps(problem.op, problem.model);
  }
  SpectralResult eigen() const {
    return principal_eigen(problem.op, problem.model.b, problem.clock, config.solver.eigen_tol,
                           config.solver.eigen_max_iter);
  }
};

Eigen::MatrixXd stack(const std::vector<Field>& states) {
  if (states.empty()) return {};
  Eigen::MatrixXd out(static_cast<Eigen::Index>(states.size()), states.front().size());
  for (std::size_t i = 0; i < states.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
  return out;
}

py::dict orbit_dict(const PeriodicOrbit& o) {
  py::dict d;
  d["method"] = std::string(to_string(o.method));
  d["times"] = o.times;
  d["states"] = stack(o.states);
  d["periodicity_defect"] = o.periodicity_defect;
  d["iterations"] = o.iterations;
  d["history"] = o.history;
  d["min_increment"] = o.min_increment;
  d["max_value"] = o.max_value;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seasonal nonlocal dispersal: eigenvalues, periodic orbits and long-time fate";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", base.ptr());
  py::register_exception<ExtinctionRegime>(m, "ExtinctionRegime", numerical.ptr());

  m.attr("__version__") = artifact_version();

  py::class_<Model>(m, "Model")
      .def_static("from_file", [](const std::string& path) { return Model(load_config(path)); },
                  py::arg("path"))
      .def_static(
          "from_json",
          [](const std::string& text, const std::string& base_dir) {
            return Model(parse_config_text(text, base_dir));
          },
          py::arg("text"), py::arg("base_dir") = ".")
      .def_property_readonly("nodes", [](const Model& s) { return s.problem.grid.nodes; })
      .def_property_readonly("h", [](const Model& s) { return s.problem.grid.h; })
      .def_property_readonly("b", [](const Model& s) { return s.problem.model.b; })
      .def_property_readonly("a_bar", [](const Model& s) { return s.problem.model.a_bar; })
      .def_property_readonly("K0", [](const Model& s) { return s.problem.model.K0; })
      .def_property_readonly("K_lip", [](const Model& s) { return s.problem.model.K_lip; })
      .def_property_readonly("omega", [](const Model& s) { return s.problem.clock.omega; })
      .def_property_readonly("rho", [](const Model& s) { return s.problem.clock.rho; })
      .def_property_readonly("delta", [](const Model& s) { return s.problem.clock.delta; })
      .def_property_readonly("W", [](const Model& s) { return s.problem.op.W; })
      .def_property_readonly("substeps", [](const Model& s) { return s.substeps(); })
      .def_property_readonly("config",
                             [](const Model& s) { return s.config.echo.dump(); },
                             "Resolved configuration as JSON text")
      .def("initial_state",
           [](const Model& s) { return make_initial(s.config.seed, s.problem.grid); })
      .def(
          "principal_eigen",
          [](const Model& s) {
            const auto r = s.eigen();
            py::dict d;
            d["lambda_p"] = r.lambda_p;
            d["lambda_p_omega"] = r.lambda_p_omega;
            d["phi"] = r.phi;
            d["residual"] = r.residual;
            d["iterations"] = r.iterations;
            d["bound_lower"] = r.bound_lower;
            d["bound_upper"] = r.bound_upper;
            d["h2_satisfied"] = r.h2.satisfied;
            return d;
          })
      .def(
          "simulate",
          [](const Model& s, const Field& u0, std::size_t periods, std::size_t substeps,
             bool every_substep) {
            const auto policy =
                every_substep ? SavePolicy::every_substep() : SavePolicy::period_ends();
            Trajectory t;
            {
              py::gil_scoped_release release;
              t = simulate(u0, s.problem.op, s.problem.model, periods, s.substeps(substeps),
                           policy);
            }
            return py::make_tuple(t.times, stack(t.states));
          },
          py::arg("u0"), py::arg("periods"), py::arg("substeps") = 0,
          py::arg("every_substep") = false,
          "Returns (times, states) with one state per row.")
      .def(
          "period_map",
          [](const Model& s, const Field& u0) {
            return poincare_map(u0, s.problem.op, s.problem.model, s.substeps());
          },
          py::arg("u0"))
      .def(
          "periodic_orbit",
          [](const Model& s, const std::string& method, double tol) {
            const auto eig = s.eigen();
            const std::size_t n = s.substeps();
            PeriodicOrbit orbit;
            py::gil_scoped_release release;
            if (method == "monotone") {
              const auto seed = lower_solution_seed(eig, s.problem.op, s.problem.model, n);
              orbit = monotone_iteration(seed.seed, s.problem.op, s.problem.model, n,
                                         s.problem.model.K_lip, tol, s.config.solver.max_sweeps);
            } else if (method == "poincare") {
              PoincareOptions opt;
              opt.tol = tol;
              opt.max_periods = s.config.solver.max_periods;
              orbit = poincare_fixed_point(s.problem.op, s.problem.model, eig, n, opt);
            } else {
              throw InvalidArgument("method must be 'monotone' or 'poincare'");
            }
            py::gil_scoped_acquire acquire;
            return orbit_dict(orbit);
          },
          py::arg("method") = "monotone", py::arg("tol") = 1e-8)
      .def(
          "classify",
          [](const Model& s, std::optional<Field> u0, std::size_t periods) {
            ClassifyOptions opt;
            opt.periods = periods ? periods : s.config.solver.periods;
            opt.extinct_threshold = s.config.solver.extinct_threshold;
            opt.margin = s.config.solver.margin;
            opt.substeps = s.config.solver.substeps;
            opt.periodic_tol = s.config.solver.periodic_tol;
            const Field start = u0 ? *u0 : make_initial(s.config.seed, s.problem.grid);
            DichotomyVerdict v;
            {
              py::gil_scoped_release release;
              v = classify_run(s.problem, start, opt);
            }
            py::dict d;
            d["lambda_p"] = v.lambda_p;
            d["lambda_p_omega"] = v.lambda_p_omega;
            d["predicted"] = std::string(to_string(v.predicted));
            d["observed"] = std::string(to_string(v.observed));
            d["agrees"] = v.agrees();
            d["per_period_ratio"] = v.per_period_ratio;
            d["theta_to_orbit"] = v.theta_to_orbit;
            d["sup_history"] = v.sup_history;
            d["final_state"] = v.final_state;
            d["degenerate_input"] = v.degenerate_input;
            return d;
          },
          py::arg("u0") = py::none(), py::arg("periods") = 0);

  m.def("theta_metric", &theta_metric, py::arg("u"), py::arg("v"),
        "Part metric max_i |ln(v_i / u_i)| between positive states.");
  m.def(
      "constant_orbit_value",
      [](double omega, double rho, double delta, double b, double c_sat) {
        return constant_orbit_value(SeasonClock::make(omega, rho, delta), b, c_sat);
      },
      py::arg("omega"), py::arg("rho"), py::arg("delta"), py::arg("b"), py::arg("c_sat") = 1.0);
  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs one sdisp subcommand; returns (exit_code, stdout, stderr).");
}
