#include "aara/ip.hpp"
#include "aara/multi.hpp"
#include "aara/parser.hpp"
#include "aara/report.hpp"
#include "aara/tm.hpp"
#include "aara/uni.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace aara;

namespace {

CheckedProgram load(const std::string& source) { return check_program(parse_program(source)); }

std::string analyze(const std::string& source, const std::string& mode, unsigned degree, const std::string& metric,
                    const std::optional<std::string>& require_output, const std::string& name) {
  CheckedProgram cp = load(source);
  if (mode == "uni") {
    UniOptions opt;
    opt.degree = degree;
    opt.metric = parse_metric(metric);
    if (require_output) opt.require_output = parse_annot(*require_output);
    return to_json(report_uni(name, cp, opt));
  }
  if (mode == "multi") {
    MultiOptions opt;
    opt.degree = degree;
    opt.metric = parse_metric(metric);
    if (require_output) opt.require_output = parse_poly(*require_output, {{"", entry_info(cp).result}}, degree);
    return to_json(report_multi(name, cp, opt));
  }
  throw std::invalid_argument("mode must be 'uni' or 'multi'");
}

std::pair<std::string, std::string> run(const std::string& source, const std::vector<std::string>& inputs,
                                        const std::string& metric, std::uint64_t fuel) {
  CheckedProgram cp = load(source);
  std::vector<ValuePtr> vs;
  for (auto& s : inputs) vs.push_back(parse_value(s));
  EvalResult r = run_program(cp, vs, parse_metric(metric), fuel);
  return {to_string(r.value), to_string(r.cost)};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Resource analysis for RaML-lite";
  py::register_exception<SyntaxError>(m, "SourceError", PyExc_ValueError);
  py::register_exception<TmError>(m, "MachineError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_RuntimeError);

  m.def("run", &run, py::arg("source"), py::arg("inputs"), py::arg("metric") = "time",
        py::arg("fuel") = kDefaultFuel, "Evaluate a program; returns (value, cost) as text.");
  m.def("analyze", &analyze, py::arg("source"), py::arg("mode") = "uni", py::arg("degree") = 2,
        py::arg("metric") = "tick", py::arg("require_output") = std::nullopt, py::arg("name") = "program",
        "Infer a bound; returns the structured report as JSON text.");
  m.def(
      "ip", [](const std::string& source, const std::string& name) { return to_json(report_ip(name, load(source))); },
      py::arg("source"), py::arg("name") = "program");
  m.def(
      "compile_tm",
      [](const std::string& text) {
        TmSpec spec = parse_tm(text);
        if (!spec.bound) throw TmError("machine has no `bound` line");
        return compile_tm_source(spec.machine, *spec.bound);
      },
      py::arg("machine"));
  m.def(
      "certify_tm",
      [](const std::string& text, std::size_t max_len, const std::string& name) {
        return to_json(report_tm(name, parse_tm(text), max_len));
      },
      py::arg("machine"), py::arg("max_len") = 8, py::arg("name") = "machine");
  m.def(
      "run_tm",
      [](const std::string& text, const std::string& w, std::uint64_t max_steps) {
        TmRun r = run_tm(parse_tm(text).machine, w, max_steps);
        return std::make_pair(r.output, r.steps);
      },
      py::arg("machine"), py::arg("word"), py::arg("max_steps") = 1'000'000);
  m.def("amp_program", [](unsigned d) { return amp_program(d, Fill::Blank); }, py::arg("degree"));
}
