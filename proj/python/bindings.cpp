// Thin bindings: structured results cross the boundary as JSON text and are
// decoded on the Python side, so the schema matches the CLI exactly.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "xorst/ghz_device.hpp"
#include "xorst/io.hpp"
#include "xorst/jordan.hpp"
#include "xorst/robustness.hpp"
#include "xorst/verdict.hpp"

namespace py = pybind11;
using namespace xorst;

namespace {

XorGame make_game(int players, const std::vector<double>& table) { return XorGame(players, table); }

std::string classify_json(int players, const std::vector<double>& table) {
  return json(classify(make_game(players, table))).dump();
}

std::string robustness_json(int players, const std::vector<double>& table, const std::string& cls,
                            int samples, std::uint64_t seed) {
  RobustnessConfig c;
  c.cls = strategy_class_from_string(cls);
  c.samples_per_eps = samples;
  c.seed = seed;
  return json(run_robustness_experiment(make_game(players, table), c)).dump();
}

std::string jordan_json(const std::string& pair) {
  return decomposition_to_json(block_decompose(pair_from_json(json::parse(pair)))).dump();
}

std::string ghz_json(const std::string& device) {
  const Qubit222Device d = device_from_json(json::parse(device));
  json r;
  r["pass_probability"] = pass_probability_direct(d);
  r["pass_probability_formula"] = pass_probability_formula(d);
  r["phase_bounds_ok"] = check_phase_bounds(d).ok;
  r["state_bounds_ok"] = check_state_bounds(d).ok;
  r["post_state_bound_ok"] = check_post_state_bound(d).ok;
  return r.dump();
}

}  // namespace

PYBIND11_MODULE(_xorst, m) {
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);
  m.attr("__version__") = XORST_VERSION;
  m.def("compute_qf", [](int n, const std::vector<double>& t) { return compute_qf(make_game(n, t)); },
        py::arg("players"), py::arg("table"));
  m.def("compute_qf_prime", [](int n, const std::vector<double>& t) { return compute_qf_prime(make_game(n, t)); },
        py::arg("players"), py::arg("table"));
  m.def("eval_Z", [](int n, const std::vector<double>& t, const std::vector<double>& theta) {
        return eval_Z(make_game(n, t), TorusPoint(Eigen::Map<const VecR>(theta.data(), theta.size())));
      }, py::arg("players"), py::arg("table"), py::arg("theta"));
  m.def("classify_json", &classify_json, py::arg("players"), py::arg("table"));
  m.def("robustness_json", &robustness_json, py::arg("players"), py::arg("table"), py::arg("strategy_class"),
        py::arg("samples"), py::arg("seed"));
  m.def("jordan_json", &jordan_json, py::arg("pair"));
  m.def("ghz_json", &ghz_json, py::arg("device"));
}
