#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "spdc/error.hpp"
#include "spdc/fit.hpp"
#include "spdc/kernel.hpp"
#include "spdc/metrics.hpp"
#include "spdc/schmidt.hpp"
#include "spdc/store.hpp"

namespace py = pybind11;
using namespace spdc;

namespace {

SpdcParams make_params(double b_sigma, double phi, const std::string& kind) {
  SpdcParams p{b_sigma, phi, parse_phase_matching(kind)};
  p.validate();
  return p;
}

RadialGrid make_grid(const SpdcParams& p, std::size_t grid_n, std::optional<double> q_max) {
  return q_max ? RadialGrid::with_extent(grid_n, *q_max) : default_grid(p, grid_n);
}

Eigen::VectorXd grid_points(const RadialGrid& g) {
  Eigen::VectorXd q(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) q[static_cast<Eigen::Index>(i)] = g.point(i);
  return q;
}

RadialKernel kernel_for(const SpdcParams& p, int l, const RadialGrid& g, const std::string& path) {
  const KernelPath k = parse_kernel_path(path);
  const bool analytic = k == KernelPath::kAnalytic || (k == KernelPath::kAuto && is_sinc(p.kind));
  return analytic ? radial_kernel_analytic(p, l, g) : radial_kernel_quadrature(p, l, g);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Schmidt decomposition of the transverse two-photon amplitude";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<UnsupportedKindError>(m, "UnsupportedKindError", PyExc_ValueError);
  py::register_exception<AccuracyError>(m, "AccuracyError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<LookupError>(m, "LookupError", PyExc_KeyError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_IndexError);
  py::register_exception<FitError>(m, "FitError", base.ptr());

  m.def("amplitude",
        [](double b_sigma, double phi, double q1, double q2, double dtheta, const std::string& kind) {
          return amplitude(make_params(b_sigma, phi, kind), q1, q2, dtheta);
        },
        py::arg("b_sigma"), py::arg("phi"), py::arg("q1"), py::arg("q2"), py::arg("dtheta"),
        py::arg("kind") = "sinc");

  m.def("radial_kernel",
        [](double b_sigma, double phi, int l, const std::string& kind, std::size_t grid_n,
           std::optional<double> q_max, const std::string& path) {
          const auto p = make_params(b_sigma, phi, kind);
          const auto g = make_grid(p, grid_n, q_max);
          return py::make_tuple(grid_points(g), kernel_for(p, l, g, path).entries);
        },
        py::arg("b_sigma"), py::arg("phi") = 0.0, py::arg("l") = 0, py::arg("kind") = "sinc",
        py::arg("grid_n") = kDefaultGridPoints, py::arg("q_max") = std::nullopt,
        py::arg("kernel") = "auto",
        "Grid points and the symmetric radial kernel matrix for one l.");

  py::class_<Decomposition>(m, "Decomposition")
      .def_property_readonly("weights", [](const Decomposition& d) { return d.spectrum.weights; })
      .def_property_readonly("captured_mass", [](const Decomposition& d) { return d.spectrum.captured_mass; })
      .def_property_readonly("l_max", [](const Decomposition& d) { return d.spectrum.l_max; })
      .def_property_readonly("warnings", [](const Decomposition& d) { return d.spectrum.warnings; })
      .def_property_readonly("kernel", [](const Decomposition& d) { return to_string(d.spectrum.path); })
      .def_property_readonly("q", [](const Decomposition& d) { return grid_points(d.spectrum.grid); })
      .def_property_readonly("schmidt_number", [](const Decomposition& d) { return schmidt_number(d.spectrum); })
      .def_property_readonly("azimuthal_schmidt_number",
                             [](const Decomposition& d) {
                               return azimuthal_schmidt_number(spiral_spectrum(d.spectrum));
                             })
      .def_property_readonly("spiral",
                             [](const Decomposition& d) { return spiral_spectrum(d.spectrum).probabilities; })
      .def("weight", [](const Decomposition& d, int l, int p) { return d.spectrum.weight(l, p); })
      .def("visibility",
           [](const Decomposition& d, double dtheta) {
             return hom_visibility(spiral_spectrum(d.spectrum), dtheta);
           })
      .def("mode", [](const Decomposition& d, int l, int p) { return d.mode(l, p).samples; },
           "Radial mode phi_{l,p} sampled on the grid (orthonormal with the step as weight).")
      .def("report",
           [](const Decomposition& d, const std::vector<double>& angles) {
             return metrics_report(d, angles).dump();
           },
           py::arg("angles") = std::vector<double>{});

  m.def("decompose",
        [](double b_sigma, double phi, const std::string& kind, std::size_t grid_n,
           std::optional<double> q_max, const std::string& path, int l_max, int p_max,
           bool keep_modes) {
          const auto p = make_params(b_sigma, phi, kind);
          DecompositionOptions o;
          o.path = parse_kernel_path(path);
          o.l_max = l_max;
          o.p_max = p_max;
          o.keep_modes = keep_modes;
          py::gil_scoped_release release;
          return full_decomposition(p, make_grid(p, grid_n, q_max), o);
        },
        py::arg("b_sigma"), py::arg("phi") = 0.0, py::arg("kind") = "sinc",
        py::arg("grid_n") = kDefaultGridPoints, py::arg("q_max") = std::nullopt,
        py::arg("kernel") = "auto", py::arg("l_max") = 2000, py::arg("p_max") = -1,
        py::arg("keep_modes") = true);

  m.def("gaussian_schmidt_number", &gaussian_schmidt_number, py::arg("b_sigma"));
  m.def("rescaled_schmidt_number", &rescaled_schmidt_number, py::arg("b_sigma"), py::arg("alpha"),
        py::arg("beta"));
  m.def("alpha_from_1e_criterion", [] { return alpha_from_1e_criterion(); });

  m.def("fit_rescaling",
        [](const std::vector<double>& b_sigma, const std::vector<double>& k) {
          if (b_sigma.size() != k.size()) throw ShapeError("b_sigma and K lengths differ");
          std::vector<ScanSample> s;
          for (std::size_t i = 0; i < k.size(); ++i) s.push_back({b_sigma[i], k[i]});
          const auto f = fit_rescaling(s);
          py::dict out;
          out["alpha"] = f.alpha;
          out["beta"] = f.beta;
          out["residual"] = f.residual;
          out["alpha_prime"] = f.alpha_prime ? py::cast(*f.alpha_prime) : py::none();
          return out;
        },
        py::arg("b_sigma"), py::arg("k"));
}
