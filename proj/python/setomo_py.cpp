#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "setomo/oracle.hpp"
#include "setomo/pipeline.hpp"
#include "setomo/reconstruction.hpp"
#include "setomo/schmidt.hpp"
#include "setomo/signals.hpp"

namespace py = pybind11;
using namespace setomo;

namespace {

using ComplexArray = py::array_t<cplx, py::array::c_style | py::array::forcecast>;

ComplexArray to_array(const Field2D& f) {
  ComplexArray out({f.rows(), f.cols()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

ComplexArray to_array(const Field1D& f) {
  ComplexArray out(f.size());
  std::copy(f.values.begin(), f.values.end(), out.mutable_data());
  return out;
}

Field2D from_array(const ModeGrid& gs, const ModeGrid& gi, const ComplexArray& a) {
  if (a.ndim() != 2 || a.shape(0) != gs.size() || a.shape(1) != gi.size()) {
    fail(ErrorKind::kInvalidArgument, "array shape does not match the grids");
  }
  return Field2D(gs, gi, std::vector<cplx>(a.data(), a.data() + a.size()));
}

ComplexArray modes_array(const std::vector<Field1D>& modes, int n) {
  ComplexArray out({static_cast<py::ssize_t>(modes.size()), static_cast<py::ssize_t>(n)});
  cplx* p = out.mutable_data();
  for (const auto& m : modes) p = std::copy(m.values.begin(), m.values.end(), p);
  return out;
}

}  // namespace

PYBIND11_MODULE(_setomo, m) {
  m.doc() = "Seeded-interferometer tomography of joint modal functions";
  m.attr("__version__") = toolkit_version();

  static py::exception<Error> error(m, "SetomoError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetObject(error.ptr(), py::make_tuple(e.what(), error_kind_name(e.kind())).ptr());
    }
  });

  py::class_<ModeGrid>(m, "ModeGrid")
      .def(py::init<double, double, int>(), py::arg("center"), py::arg("span"), py::arg("n"))
      .def_property_readonly("center", &ModeGrid::center)
      .def_property_readonly("span", &ModeGrid::span)
      .def_property_readonly("spacing", &ModeGrid::spacing)
      .def_property_readonly("size", &ModeGrid::size)
      .def("points", [](const ModeGrid& g) { return py::array_t<double>(py::cast(g.points())); })
      .def("__eq__", [](const ModeGrid& a, const ModeGrid& b) { return a == b; })
      .def("__repr__", [](const ModeGrid& g) {
        return "ModeGrid(center=" + std::to_string(g.center()) + ", span=" + std::to_string(g.span()) +
               ", n=" + std::to_string(g.size()) + ")";
      });
  m.def("conjugate_grid", &conjugate_grid, py::arg("grid"), py::arg("center") = 0.0);

  py::class_<JointAmplitude>(m, "JointAmplitude")
      .def_property_readonly("kernel", [](const JointAmplitude& j) { return to_array(j.kernel); })
      .def_property_readonly("grid_s", [](const JointAmplitude& j) { return j.kernel.grid_s(); })
      .def_property_readonly("grid_i", [](const JointAmplitude& j) { return j.kernel.grid_i(); })
      .def_readonly("norm_factor", &JointAmplitude::norm_factor)
      .def_readonly("normalized", &JointAmplitude::normalized)
      .def_property_readonly("gain", [](const JointAmplitude& j) { return j.coupling.gain; });
  m.def(
      "normalize",
      [](const ModeGrid& gs, const ModeGrid& gi, const ComplexArray& a) { return normalize(from_array(gs, gi, a)); },
      py::arg("grid_s"), py::arg("grid_i"), py::arg("kernel"));
  m.def("gaussian_jsa", &gaussian_jsa, py::arg("sigma_plus"), py::arg("sigma_minus"), py::arg("chirp"),
        py::arg("grid_s"), py::arg("grid_i"));

  py::class_<SchmidtData>(m, "SchmidtData")
      .def_readonly("sqrt_lambdas", &SchmidtData::sqrt_lambdas)
      .def_property_readonly("lambdas", &SchmidtData::lambdas)
      .def_property_readonly("rank", &SchmidtData::rank)
      .def_readonly("dropped_weight", &SchmidtData::dropped_weight)
      .def_property_readonly("psi", [](const SchmidtData& s) { return modes_array(s.psi, s.psi.front().size()); })
      .def_property_readonly("phi", [](const SchmidtData& s) { return modes_array(s.phi, s.phi.front().size()); });
  m.def(
      "schmidt_decompose", [](const JointAmplitude& j, double tol) { return schmidt_decompose(j, tol); },
      py::arg("jsa"), py::arg("tol") = kDefaultSchmidtTol);
  m.def("schmidt_number", &schmidt_number);

  py::class_<SeedProfile>(m, "SeedProfile")
      .def_property_readonly("alpha", [](const SeedProfile& s) { return to_array(s.alpha); })
      .def_property_readonly("grid", [](const SeedProfile& s) { return s.alpha.grid; })
      .def("total_intensity", &SeedProfile::total_intensity)
      .def_static("flat", &SeedProfile::flat, py::arg("grid"), py::arg("amplitude"))
      .def_static("gaussian", &SeedProfile::gaussian, py::arg("grid"), py::arg("amplitude"), py::arg("center"),
                  py::arg("sigma"))
      .def_static("point", &SeedProfile::point, py::arg("grid"), py::arg("k0"), py::arg("weight"))
      .def_static("from_array", [](const ModeGrid& g, const ComplexArray& a) {
        if (a.ndim() != 1 || a.shape(0) != g.size()) fail(ErrorKind::kInvalidArgument, "seed length does not match grid");
        return SeedProfile{Field1D(g, std::vector<cplx>(a.data(), a.data() + a.size()))};
      });

  py::class_<InterferometerSettings>(m, "InterferometerSettings")
      .def(py::init([](double qs, double qe, double theta) { return InterferometerSettings{qs, qe, theta}; }),
           py::arg("q_sigma") = 0.0, py::arg("q_eta") = 0.0, py::arg("theta") = 0.0)
      .def_readwrite("q_sigma", &InterferometerSettings::q_sigma)
      .def_readwrite("q_eta", &InterferometerSettings::q_eta)
      .def_readwrite("theta", &InterferometerSettings::quadrature_theta);

  m.def("stimulated_spectrum",
        py::overload_cast<const SchmidtData&, double, const SeedProfile&>(&stimulated_spectrum));
  m.def("total_signal_photons", &total_signal_photons);
  m.def("interferometric_signal_exact", &interferometric_signal_exact);
  m.def("interferometric_signal_lowgain",
        py::overload_cast<const JointAmplitude&, double, const SeedProfile&, const InterferometerSettings&>(
            &interferometric_signal_lowgain));

  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def_property_readonly("map", [](const MeasurementRecord& r) { return to_array(r.map); })
      .def_property_readonly("grid_sigma", &MeasurementRecord::grid_sigma)
      .def_property_readonly("grid_eta", &MeasurementRecord::grid_eta)
      .def_readonly("gain_used", &MeasurementRecord::gain_used)
      .def_property_readonly("provenance", [](const MeasurementRecord& r) { return provenance_name(r.provenance); })
      .def("to_json", [](const MeasurementRecord& r) { return record_to_json(r).dump(); })
      .def_static("from_json", [](const std::string& s) { return record_from_json(json::parse(s)); });
  m.def("dual_grid", &dual_sigma_grid, py::arg("mode_grid"));
  m.def(
      "sample_signal_map",
      [](const JointAmplitude& j, double gain, const SeedProfile& seed, const ModeGrid& gs, const ModeGrid& ge) {
        return sample_signal_map(effective_kernel(j), gain, seed, gs, ge);
      },
      py::arg("jsa"), py::arg("gain"), py::arg("seed"), py::arg("grid_sigma"), py::arg("grid_eta"));

  py::class_<Reconstruction>(m, "Reconstruction")
      .def_readonly("jsa", &Reconstruction::jsa)
      .def_property_readonly("mask",
                             [](const Reconstruction& r) {
                               py::array_t<bool> out({r.jsa.kernel.rows(), r.jsa.kernel.cols()});
                               std::copy(r.mask.begin(), r.mask.end(), out.mutable_data());
                               return out;
                             })
      .def_readonly("masked_fraction", &Reconstruction::masked_fraction)
      .def_readonly("residual", &Reconstruction::residual);
  m.def("invert_to_modal", &invert_to_modal, py::arg("record"), py::arg("seed"), py::arg("gain"),
        py::arg("reg_eps") = kDefaultRegEps);
  m.def(
      "fidelity",
      [](const JointAmplitude& a, const JointAmplitude& b, std::optional<Reconstruction> rec) {
        return rec ? fidelity(a, b, &rec->mask) : fidelity(a, b);
      },
      py::arg("a"), py::arg("b"), py::arg("mask_from") = py::none());

  m.def(
      "nyquist_check",
      [](const JointAmplitude& j, const ModeGrid& gs, const ModeGrid& ge) {
        const NyquistReport r = nyquist_check(j.kernel, gs, ge);
        py::dict d;
        d["pass"] = r.pass;
        d["sampling_ok"] = r.sampling_ok;
        d["span_ok"] = r.span_ok;
        d["k_max_sigma"] = r.k_max_sigma;
        d["k_max_eta"] = r.k_max_eta;
        d["required_dq_sigma"] = r.required_dq_sigma;
        d["required_dq_eta"] = r.required_dq_eta;
        d["edge_ratio"] = r.edge_ratio;
        return d;
      },
      py::arg("jsa"), py::arg("grid_sigma"), py::arg("grid_eta"));

  m.def(
      "oracle_max_deviation",
      [](int trials, int max_modes, double max_gain, std::uint64_t seed) {
        return run_oracle_check(trials, max_modes, max_gain, seed).max_rel;
      },
      py::arg("trials") = 100, py::arg("max_modes") = 8, py::arg("max_gain") = 2.0, py::arg("seed") = 0);

  m.def(
      "_run_scenario",
      [](const std::string& config_text, const std::string& scenario) {
        const ConfigReport rep = parse_config(config_text);
        if (!rep.ok()) fail(ErrorKind::kConfig, rep.errors.front());
        ScenarioOutput out = run_scenario(rep.config, scenario);
        py::dict files;
        for (const auto& [name, text] : out.files) files[py::str(name)] = py::bytes(text);
        return py::make_tuple(files, out.files.at("summary.json"));
      },
      py::arg("config_text"), py::arg("scenario"));
}
