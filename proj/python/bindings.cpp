#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ctunnel/action.hpp"
#include "ctunnel/config.hpp"
#include "ctunnel/errors.hpp"
#include "ctunnel/gap.hpp"
#include "ctunnel/potential.hpp"
#include "ctunnel/sweep.hpp"
#include "ctunnel/wkb.hpp"

namespace py = pybind11;
using namespace ctunnel;

namespace {

py::dict report_dict(const GapReport& r) {
  py::dict d;
  d["alpha"] = r.alpha;
  d["h"] = r.h;
  d["mu1"] = r.mu1;
  d["mu2"] = r.mu2;
  d["gap_direct"] = r.has_direct ? py::cast(r.gap_direct) : py::none();
  d["gap_wronskian"] = r.has_wronskian ? py::cast(r.gap_wronskian) : py::none();
  d["gap_asymptotic"] = r.gap_asymptotic;
  d["A"] = r.A_const;
  d["S_alpha"] = r.S_alpha;
  d["ratio_direct"] = r.ratio_direct;
  d["ratio_wronskian"] = r.ratio_wronskian;
  d["ratio_transport_direct"] = r.ratio_transport_direct;
  d["ratio_transport_wronskian"] = r.ratio_transport_wronskian;
  d["arg_dev"] = r.arg_dev;
  d["eigenvalues"] = r.eigenvalues;
  d["flags"] = r.flags;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ctunnel, m) {
  m.doc() = "Tunneling gaps of complex-rotated double wells";
  m.attr("__version__") = kVersion;

  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericFailure>(m, "NumericFailure", PyExc_RuntimeError);

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("quartic", &PotentialSpec::quartic)
      .def_static("figure", &PotentialSpec::figure)
      .def_static("custom",
                  [](const std::string& expr, double x_well) {
                    return PotentialSpec::custom(expr, x_well);
                  },
                  py::arg("expr"), py::arg("x_well"))
      .def("__call__", [](const PotentialSpec& p, double x) { return p(x); })
      .def("eval", &PotentialSpec::eval, py::arg("x"), py::arg("order") = 0)
      .def_property_readonly("x_left", &PotentialSpec::x_left)
      .def_property_readonly("x_right", &PotentialSpec::x_right)
      .def_property_readonly("v0", &PotentialSpec::v0)
      .def_property_readonly("frequency", &PotentialSpec::frequency)
      .def_property_readonly("description", &PotentialSpec::description);

  m.def("complex_action", &complex_action, py::arg("potential"), py::arg("alpha"));
  m.def("asymptotic_constant", &asymptotic_constant_A, py::arg("potential"), py::arg("alpha"));
  m.def("transport_prefactor", &transport_prefactor, py::arg("potential"), py::arg("alpha"));
  m.def("gap_prediction", &gap_prediction, py::arg("potential"), py::arg("alpha"), py::arg("h"));

  m.def(
      "wkb_eigenvalue",
      [](const PotentialSpec& p, double alpha, int n, int J) {
        return wkb_eigenvalue(seal(p, SealSide::Right), alpha, n, J);
      },
      py::arg("potential"), py::arg("alpha"), py::arg("n") = 1, py::arg("J") = 3,
      "Coefficients mu_1..mu_J of the left-well eigenvalue series in h.");

  m.def(
      "gap_report",
      [](const PotentialSpec& p, double alpha, double h, int n_points) {
        GapOptions opt;
        opt.solver.n_points = n_points;
        GapReport r;
        {
          py::gil_scoped_release release;
          r = gap_report(p, alpha, h, opt);
        }
        return report_dict(r);
      },
      py::arg("potential"), py::arg("alpha"), py::arg("h"), py::arg("n_points") = 401);

  m.def(
      "validate_config",
      [](const std::string& text) {
        const RunConfig c = parse_config(text);
        py::dict d;
        d["name"] = c.name;
        d["alphas"] = c.alphas;
        d["h_grid"] = c.h_grid;
        return d;
      },
      py::arg("text"));
}
