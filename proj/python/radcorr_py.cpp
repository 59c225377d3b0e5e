#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "radcorr/cli.hpp"
#include "radcorr/dynamics.hpp"
#include "radcorr/errors.hpp"
#include "radcorr/fock.hpp"
#include "radcorr/generator.hpp"
#include "radcorr/higher_order.hpp"
#include "radcorr/model.hpp"

namespace py = pybind11;
using namespace radcorr;

namespace {

ModelParams make_params(double mu, double mass, double epsilon, const std::string& form_factor,
                        double lambda, double a) {
  ModelParams p;
  p.mu = mu;
  p.dispersion.mass = mass;
  p.epsilon = epsilon;
  if (form_factor == "nelson") {
    p.form_factor = FormFactor::nelson(lambda);
  } else if (form_factor == "powerlaw") {
    p.form_factor = FormFactor::power_law(a, lambda);
  } else {
    fail(ErrorKind::Usage, "python", "form_factor must be 'nelson' or 'powerlaw'");
  }
  require_valid(p);
  return p;
}

}  // namespace

PYBIND11_MODULE(radcorr, m) {
  m.doc() = "Effective dispersion generators of a tracer coupled to a Bose field";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      error(e.line().c_str());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init(&make_params), py::arg("mu") = 100.0, py::arg("mass") = 0.0,
           py::arg("epsilon") = 0.25, py::arg("form_factor") = "nelson", py::arg("lambda_") = 1.0,
           py::arg("a") = 0.25)
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("epsilon", &ModelParams::epsilon)
      .def_property_readonly("mass", &ModelParams::mass)
      .def("__repr__", [](const ModelParams& p) { return "ModelParams(" + describe(p) + ")"; });

  m.def(
      "mu_norm",
      [](const ModelParams& p, double s) { return mu_norm(p.form_factor, s, p.mu, p.mass()); },
      py::arg("params"), py::arg("s"), "||(omega + 1/mu)^-s V||_L2");
  m.def("solve_g", &solve_g, py::arg("p"), py::arg("params"), py::arg("tol") = 1e-11,
        "self-consistent g(|p|)");
  m.def("eval_F", py::overload_cast<double, double, const ModelParams&>(&eval_F), py::arg("p"),
        py::arg("x"), py::arg("params"));
  m.def("g_eff", &eval_g_eff, py::arg("p"), py::arg("g0"), py::arg("params"));
  m.def("alpha", &alpha_coeff, py::arg("j"), py::arg("g0"), py::arg("params"));
  m.def(
      "g_bounds",
      [](const ModelParams& p) {
        const Bracket b = g_bounds(p);
        return py::make_tuple(b.lower, b.upper);
      },
      py::arg("params"));

  m.def(
      "sigma0",
      [](int j) {
        std::vector<std::vector<int>> out;
        for (const auto& s : enumerate_sigma0(j)) out.push_back(s.entries);
        return out;
      },
      py::arg("j"), "sign sequences of length j with proper prefix sums >= 1 and total 0");
  m.def(
      "wick_pairings",
      [](const std::vector<int>& signs) {
        std::vector<std::vector<std::pair<int, int>>> out;
        for (const auto& w : wick_pairings(SignSequence{signs})) out.push_back(w.pairs);
        return out;
      },
      py::arg("signs"));

  m.def(
      "region",
      [](double a, double b, int N) {
        const RegionVerdict v = region_verdict(a, b, N);
        return py::make_tuple(v.inside, v.binding, v.limit);
      },
      py::arg("a"), py::arg("b"), py::arg("N"), "(inside, binding constraint, limit)");

  m.def(
      "fiber_error",
      [](const ModelParams& p, double t, double h, double kmax, int n_max, double p_total) {
        FiberSpec s;
        s.params = p;
        s.lattice = MomentumLattice::cubic(h, kmax, !p.massless());
        s.n_max = n_max;
        s.p_total = {0.0, 0.0, p_total};
        const FiberRun r = fiber_error(s, t);
        py::dict d;
        d["error"] = r.error;
        d["vacuum_pop"] = r.vacuum_pop;
        d["energy_drift"] = r.energy_drift;
        d["norm_error"] = r.norm_error;
        d["g_lat"] = r.g_lat;
        d["dimension"] = r.dimension;
        return d;
      },
      py::arg("params"), py::arg("t"), py::arg("h") = 0.25, py::arg("kmax") = 1.25,
      py::arg("n_max") = 2, py::arg("p_total") = 0.0);

  m.def(
      "run",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "run the command-line tool; returns (exit code, stdout, stderr)");
}
