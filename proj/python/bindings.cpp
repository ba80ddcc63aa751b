#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ueclab/report.hpp"

namespace py = pybind11;
using namespace ueclab;

namespace {

OperatorFamily family_from(const BasisIndexing& ix,
                           const std::vector<std::pair<std::string, Mat>>& ms) {
  OperatorFamily fam;
  fam.indexing = ix;
  fam.members = ms;
  fam.validate();
  return fam;
}

}  // namespace

PYBIND11_MODULE(_ueclab, m) {
  m.doc() = "weak-topology equicontinuity laboratory (C++ core)";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<NumericContractError>(m, "NumericContractError");

  py::enum_<IndexKind>(m, "IndexKind")
      .value("natural", IndexKind::Natural)
      .value("integer", IndexKind::Integer);

  py::class_<BasisIndexing>(m, "BasisIndexing")
      .def(py::init<IndexKind, int>(), py::arg("kind"),
           py::arg("truncation_dim"))
      .def_readonly("kind", &BasisIndexing::kind)
      .def_readonly("truncation_dim", &BasisIndexing::truncation_dim)
      .def("storage_of", &BasisIndexing::storage_of)
      .def("abstract_of", &BasisIndexing::abstract_of)
      .def("basis_vector", &BasisIndexing::basis_vector);

  py::class_<MetricValue>(m, "MetricValue")
      .def_readonly("value", &MetricValue::value)
      .def_readonly("truncation_error", &MetricValue::truncation_error)
      .def("__float__", [](const MetricValue& v) { return v.value; })
      .def("__repr__", [](const MetricValue& v) {
        return "MetricValue(value=" + std::to_string(v.value) +
               ", truncation_error=" + std::to_string(v.truncation_error) +
               ")";
      });

  py::class_<MetricScheme>(m, "MetricScheme")
      .def_readonly("schedule", &MetricScheme::schedule)
      .def_readonly("net_quality", &MetricScheme::net_quality)
      .def_readonly("tail_bound", &MetricScheme::tail_bound)
      .def_property_readonly("h_seq",
                             [](const MetricScheme& s) { return s.h_seq; })
      .def("id", &MetricScheme::id)
      .def("dim", &MetricScheme::dim);

  m.def("build_scheme", &build_scheme, py::arg("indexing"), py::arg("L"),
        py::arg("net_depth"), py::arg("seed"));
  m.def("rho", &rho, py::arg("x"), py::arg("y"), py::arg("scheme"));
  m.def("d_metric", &d_metric, py::arg("a"), py::arg("b"), py::arg("scheme"));
  m.def("sample_unit_ball", &sample_unit_ball, py::arg("dim"),
        py::arg("count"), py::arg("seed"));

  py::class_<OperatorFamily>(m, "OperatorFamily")
      .def(py::init(&family_from), py::arg("indexing"), py::arg("members"))
      .def_readonly("descriptor", &OperatorFamily::descriptor)
      .def_property_readonly(
          "labels",
          [](const OperatorFamily& f) {
            std::vector<std::string> out;
            for (const auto& [l, _] : f.members) out.push_back(l);
            return out;
          })
      .def("member",
           [](const OperatorFamily& f, const std::string& label) -> Mat {
             for (const auto& [l, m] : f.members)
               if (l == label) return m;
             throw ValidationError("no member labeled " + label);
           })
      .def("__len__", &OperatorFamily::size)
      .def("dim", &OperatorFamily::dim);

  m.def("left_shift_powers", &left_shift_powers);
  m.def("right_shift_powers", &right_shift_powers);
  m.def("adjoint_right_shift_powers", &adjoint_right_shift_powers);
  m.def("mult_group_family", &mult_group_family, py::arg("t_list"),
        py::arg("n_modes"));
  m.def("mult_group_element", &mult_group_element, py::arg("t"),
        py::arg("n_modes"));
  m.def("rank_one", &rank_one);
  m.def("operator_norm", &operator_norm);

  m.def(
      "dim_criterion",
      [](const OperatorFamily& fam, const std::vector<Vec>& v_basis, double c,
         const std::vector<int>& truncations) {
        return to_json(dim_criterion(fam, v_basis, c, truncations)).dump();
      },
      py::arg("family"), py::arg("v_basis"), py::arg("c"),
      py::arg("truncations"),
      "returns the report as a JSON string");
  m.def(
      "banded_check",
      [](const OperatorFamily& fam, int K) {
        return to_json(banded_check(fam, K)).dump();
      },
      py::arg("family"), py::arg("K"));
  m.def(
      "estimate_modulus",
      [](const OperatorFamily& fam, const MetricScheme& scheme,
         const std::vector<double>& deltas, int budget, std::uint64_t seed) {
        return to_json(
                   estimate_modulus_vectors(fam, scheme, deltas, budget, seed))
            .dump();
      },
      py::arg("family"), py::arg("scheme"), py::arg("deltas"),
      py::arg("budget"), py::arg("seed"));
  m.def(
      "certificate_search",
      [](const OperatorFamily& fam, const MetricScheme& scheme,
         double delta_max, double gain_min, std::uint64_t seed,
         int budget) -> py::object {
        auto cert =
            certificate_search(fam, scheme, delta_max, gain_min, seed, budget);
        if (!cert) return py::none();
        return py::str(to_json(*cert).dump());
      },
      py::arg("family"), py::arg("scheme"), py::arg("delta_max"),
      py::arg("gain_min"), py::arg("seed"), py::arg("budget") = 10000);
  m.def("default_delta_grid", &default_delta_grid);

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        auto cfg = ExperimentConfig::parse(json::parse(config_json));
        return run_experiment(cfg).dump();
      },
      py::arg("config_json"),
      "config and report both travel as JSON strings");
  m.def("describe_family", [](const std::string& config_json) {
    return describe_family(ExperimentConfig::parse(json::parse(config_json)));
  });
}
