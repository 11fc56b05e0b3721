#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "svarwb/config.hpp"
#include "svarwb/reduced_form.hpp"
#include "svarwb/workbench.hpp"

namespace py = pybind11;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict run(const std::string& command, const std::string& config_path, std::optional<std::uint64_t> seed,
             std::optional<int> threads, std::optional<std::string> out) {
  const auto parsed = svarwb::parse_command(command);
  if (!parsed) throw py::value_error("unknown command '" + command + "'");
  svarwb::RunConfig cfg = svarwb::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (out) cfg.output = *out;
  cfg.inference.seed = cfg.seed;
  cfg.inference.threads = cfg.threads;
  std::ostringstream log;
  svarwb::RunReport report;
  {
    py::gil_scoped_release release;
    report = svarwb::run_command(*parsed, cfg, log);
  }
  py::dict d;
  d["command"] = report.command;
  d["outcome"] = report.outcome;
  d["details"] = to_python(report.details);
  d["warnings"] = report.warnings;
  d["artifacts"] = report.artifacts;
  d["output"] = cfg.output.string();
  d["log"] = log.str();
  return d;
}

py::list ols_fit(const svarwb::Matrix& y, int lags, const std::vector<int>& break_rows) {
  std::vector<int> breaks;
  for (int r : break_rows) breaks.push_back(r - 1);
  const svarwb::RegimeData data(y, breaks, lags);
  const svarwb::RegimeModel fit = svarwb::ols_fit(data);
  py::list regimes;
  for (const auto& r : fit.regimes) {
    py::dict d;
    d["intercept"] = svarwb::Vector(r.intercept());
    d["lags"] = r.lag_coefficients();
    d["sigma"] = svarwb::Matrix(r.sigma());
    regimes.append(d);
  }
  return regimes;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Structural VAR workbench with exogenous breaks";
  static py::exception<svarwb::Error> error(m, "SvarwbError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const svarwb::Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("code") = svarwb::to_string(e.code());
      exc.attr("exit_code") = svarwb::exit_code(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });
  m.def("version", &svarwb::version);
  m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("seed") = py::none(),
        py::arg("threads") = py::none(), py::arg("out") = py::none(),
        "Run identify, estimate, infer or simulate on a config file and return the report.");
  m.def("ols_fit", &ols_fit, py::arg("y"), py::arg("lags"), py::arg("break_rows") = std::vector<int>{},
        "Per-regime least squares. break_rows are 1-based rows that open a new regime.");
}
