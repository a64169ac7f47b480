#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qes/cli.hpp"
#include "qes/errors.hpp"
#include "qes/models.hpp"
#include "qes/numkit.hpp"
#include "qes/sl2.hpp"
#include "qes/susy.hpp"

namespace py = pybind11;
using namespace qes;

namespace {

susy::QesModel catalog(const std::string& name, const py::dict& params) {
  auto get = [&](const char* key, double fallback) {
    return params.contains(key) ? params[key].cast<double>() : fallback;
  };
  if (name == "razavy") return models::razavy_model(get("A", 1.0), get("alpha", 2.0));
  if (name == "sextic") return models::sextic_model(get("a", 1.0), get("b", 1.0));
  throw UsageError("unknown catalog model '" + name + "'");
}

std::vector<double> sample(const SmoothFunction1d& f, const std::vector<double>& xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(f(x));
  return out;
}

}  // namespace

PYBIND11_MODULE(_qeskit, m) {
  m.doc() = "Quasi-exactly solvable models: SUSY construction, sl(2) decomposition, spectra";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);
  py::register_exception<DecompositionError>(m, "DecompositionError", PyExc_RuntimeError);

  py::class_<susy::QesModel>(m, "Model")
      .def_readonly("name", &susy::QesModel::name)
      .def_readonly("epsilon", &susy::QesModel::epsilon)
      .def_readonly("x_ref", &susy::QesModel::x_ref)
      .def_readonly("z_gauge", &susy::QesModel::z_gauge)
      .def_property_readonly("window", [](const susy::QesModel& s) { return py::make_tuple(s.window.lo, s.window.hi); })
      .def("w_plus", [](const susy::QesModel& s, const std::vector<double>& xs) { return sample(s.w_plus, xs); })
      .def("potential", [](const susy::QesModel& s, const std::vector<double>& xs) {
        return sample(susy::potential_v(s), xs);
      })
      .def("partner_potential", [](const susy::QesModel& s, const std::vector<double>& xs) {
        return sample(susy::partner_potential(s), xs);
      })
      .def("eigenstate", [](const susy::QesModel& s, int which, const std::vector<double>& xs) {
        return sample(susy::eigenstate(s, which), xs);
      });

  m.def("model", &catalog, py::arg("name"), py::arg("params") = py::dict(),
        "Catalog model by name ('razavy' or 'sextic') with optional parameter overrides.");

  m.def(
      "verify_eigenstate",
      [](const susy::QesModel& s, int which) {
        const susy::EigenpairCheck c =
            susy::verify_eigenpair(susy::eigenstate(s, which), susy::potential_v(s), s.mass_factor, s.window);
        return py::dict(py::arg("energy") = c.energy, py::arg("residual") = c.residual,
                        py::arg("constancy") = c.constancy);
      },
      py::arg("model"), py::arg("which"));

  m.def(
      "spectrum",
      [](const susy::QesModel& s, std::size_t k, std::size_t n_coarse, std::size_t n_fine) {
        const numkit::SpectralResult r = numkit::lowest_spectrum(susy::potential_v(s), models::default_box(s.name),
                                                                 n_coarse, n_fine, s.mass_factor, k);
        return py::make_tuple(r.eigenvalues, r.refinement_error);
      },
      py::arg("model"), py::arg("k") = 4, py::arg("n_coarse") = 2000, py::arg("n_fine") = 4000,
      "Lowest k eigenvalues and their refinement errors on the default box.");

  m.def(
      "decompose",
      [](const susy::QesModel& s) {
        const sl2::ZMap z = sl2::build_zmap(s, numkit::Grid1d(s.window.lo, s.window.hi, 401));
        const sl2::ZOperator t = sl2::gauge_operator_t(s, z);
        const Interval r = z.z_range();
        const double d = 0.02 * r.width();
        const sl2::Sl2Decomposition dec = sl2::decompose_operator(t, 1, {r.lo + d, r.hi - d});
        py::dict out;
        for (std::size_t i = 0; i < sl2::kBasisSize; ++i) out[py::str(std::string(sl2::basis_name(i)))] = dec.coefficients[i];
        std::vector<double> rem;
        if (dec.remainder_poly) rem.assign(dec.remainder_poly->coeffs().begin(), dec.remainder_poly->coeffs().end());
        return py::make_tuple(out, rem);
      },
      py::arg("model"), "Coefficients of the quadratic combination and the polynomial remainder of q2.");

  m.def(
      "quartic_equivalence",
      [](const susy::QesModel& s) {
        const sl2::ZMap z = sl2::build_zmap(s, numkit::Grid1d(s.window.lo, s.window.hi, 401));
        const sl2::EquivalenceResult e = sl2::quartic_equivalence_test(s, z);
        return py::make_tuple(e.equivalent, std::vector<double>(e.c.begin(), e.c.end()), e.fit_residual);
      },
      py::arg("model"));

  m.def(
      "scalar_mode_residuals",
      [](double B, double C) {
        const models::ScalarFieldModel sf = models::scalar_field_model(B, C);
        const models::UOperator l = models::stability_operator_u(sf);
        return py::make_tuple(l.residual(models::zero_mode_u(sf), 0.0, sf.u_window()),
                              l.residual(models::first_mode_u(sf), sf.omega1_squared(), sf.u_window()),
                              sf.omega1_squared());
      },
      py::arg("B"), py::arg("C"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<const char*> argv{"qes_cli"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line front end in process; returns (exit code, stdout, stderr).");
}
