#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modshoot/analysis.hpp"
#include "modshoot/benchmarks.hpp"
#include "modshoot/errors.hpp"
#include "modshoot/harness.hpp"

namespace py = pybind11;
using namespace modshoot;

namespace {

py::dict knots_to_dict(const KnotTrajectory& t) {
  py::dict d;
  d["times"] = t.times;
  d["q"] = t.q;
  d["qdot"] = MatrixXd(t.qdot());
  d["controls"] = t.controls;
  return d;
}

py::list rows_to_list(const std::vector<RunRow>& rows) {
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["problem"] = r.problem;
    d["scheme"] = r.scheme;
    d["N"] = r.N;
    d["h"] = r.h;
    d["eta_total"] = r.has_eta ? py::object(py::float_(r.eta_total)) : py::object(py::none());
    d["solve_time_s"] = r.solve_time;
    d["outer_iters"] = r.outer_iters;
    d["inner_iters"] = r.inner_iters;
    d["status"] = std::string(status_label(r.status));
    out.append(d);
  }
  return out;
}

RunMode parse_mode(const std::string& mode) {
  if (mode == "compare") return RunMode::Compare;
  if (mode == "sweep") return RunMode::Sweep;
  throw ConfigError("mode must be compare or sweep, got '" + mode + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Modified direct shooting transcriptions for second-order systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ArithmeticError);

  m.attr("CSV_HEADER") = kCsvHeader;
  m.def("benchmark_names", &benchmark_names);
  m.def("default_params", &default_params, py::arg("name"));
  m.def(
      "accel",
      [](const std::string& name, const VectorXd& q, const VectorXd& qdot, const VectorXd& u, const ParamMap& params) {
        return eval_accel(make_benchmark(name, params), q, qdot, u);
      },
      py::arg("name"), py::arg("q"), py::arg("qdot"), py::arg("u"), py::arg("params") = ParamMap{});
  m.def(
      "rollout",
      [](const std::string& name, const std::string& scheme, const VectorXd& x0, const MatrixXd& controls, double h) {
        return knots_to_dict(rollout(make_benchmark(name), Scheme::make(parse_scheme(scheme)), x0, controls, h));
      },
      py::arg("name"), py::arg("scheme"), py::arg("x0"), py::arg("controls"), py::arg("h"));
  m.def(
      "run",
      [](const std::string& config_json, const std::string& mode, int ref_multiplier) {
        const RunConfig cfg = parse_run_config(json::parse(config_json), parse_mode(mode));
        RunSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg, ref_multiplier);
        }
        py::dict d;
        d["rows"] = rows_to_list(s.rows);
        d["reference_N"] = s.reference_N;
        d["reference_status"] = std::string(status_label(s.reference_status));
        return d;
      },
      py::arg("config_json"), py::arg("mode") = "compare", py::arg("ref_multiplier") = 8,
      "Runs a compare or sweep experiment from a JSON config string.");
  m.def(
      "convergence_study",
      [](const std::string& system, const std::string& scheme, double q0, double v0, double control, double tf,
         const std::vector<int>& N_list) {
        if (system != "damped" && system != "harmonic") throw ConfigError("system must be damped or harmonic");
        const AnalyticTestSystem sys =
            system == "harmonic" ? harmonic_test_system(q0, v0) : damped_test_system(q0, v0, control);
        const ConvergenceResult r = convergence_study(sys, Scheme::make(parse_scheme(scheme)), tf, N_list);
        py::dict d;
        d["N"] = r.N;
        d["h"] = r.h;
        d["error"] = r.error;
        d["max_error"] = r.max_error;
        d["slope"] = r.slope;
        return d;
      },
      py::arg("system"), py::arg("scheme"), py::arg("q0") = 0.0, py::arg("v0") = 1.0, py::arg("control") = 0.0,
      py::arg("tf") = 1.0, py::arg("N_list") = std::vector<int>{10, 20, 40, 80});
  m.def("euler_bound", &euler_bound, py::arg("lipschitz"), py::arg("alpha"), py::arg("tf"), py::arg("h"));
  m.def("rk4_bound", &rk4_bound, py::arg("lipschitz"), py::arg("beta"), py::arg("tf"), py::arg("h"));
  m.def("romberg", &romberg, py::arg("f"), py::arg("a"), py::arg("b"), py::arg("rel_tol") = 1e-10,
        py::arg("max_levels") = 12);
}
