#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wvlab/commands.hpp"
#include "wvlab/errors.hpp"
#include "wvlab/weak_value.hpp"

namespace py = pybind11;
using namespace wvlab;

namespace {

py::dict packet_row(const PacketWeakValues& v) {
    py::dict d;
    d["presence"] = v.presence;
    d["momentum"] = v.momentum;
    d["energy"] = v.energy;
    return d;
}

py::dict artifacts(const CommandResult& r) {
    py::dict d;
    for (const auto& a : r.artifacts) d[py::str(a.filename)] = a.content;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weak values of nonlocal observables";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<RegimeError>(m, "RegimeError", error.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<ParseError>(m, "ParseError", error.ptr());

    py::class_<PhysicalConstants>(m, "PhysicalConstants")
        .def(py::init([](double hbar, double mass) { return PhysicalConstants{hbar, mass}; }), py::arg("hbar") = 1.0,
             py::arg("mass") = 1.0)
        .def_readwrite("hbar", &PhysicalConstants::hbar)
        .def_readwrite("mass", &PhysicalConstants::mass);

    py::class_<PacketRecipe>(m, "PacketRecipe")
        .def(py::init([](double k0, double k1, double dk_f, double dk_g, double x0) {
                 PacketRecipe r{k0, k1, dk_f, dk_g, x0};
                 r.validate();
                 return r;
             }),
             py::arg("k0"), py::arg("k1"), py::arg("dk_f"), py::arg("dk_g"), py::arg("x0"))
        .def_readonly("k0", &PacketRecipe::k0)
        .def_readonly("k1", &PacketRecipe::k1)
        .def_readonly("dk_f", &PacketRecipe::dk_f)
        .def_readonly("dk_g", &PacketRecipe::dk_g)
        .def_readonly("x0", &PacketRecipe::x0)
        .def("separation_ratio", &PacketRecipe::separation_ratio)
        .def("f_overlap", &PacketRecipe::f_overlap)
        .def("__repr__", [](const PacketRecipe& r) {
            return "PacketRecipe(" + format_double(r.k0) + ", " + format_double(r.k1) + ", " +
                   format_double(r.dk_f) + ", " + format_double(r.dk_g) + ", " + format_double(r.x0) + ")";
        });

    py::class_<ComplexGaussian>(m, "ComplexGaussian")
        .def("__call__", &ComplexGaussian::operator())
        .def("norm_squared", &ComplexGaussian::norm_squared)
        .def("mean_position", &ComplexGaussian::mean_position)
        .def("mean_wavenumber", &ComplexGaussian::mean_wavenumber)
        .def("position_spread", &ComplexGaussian::position_spread)
        .def("__repr__", [](const ComplexGaussian& g) { return to_string(g); });

    m.def("gaussian_packet", &gaussian_packet, py::arg("center"), py::arg("k_mean"), py::arg("dk"));
    m.def("make_f", &make_f, py::arg("recipe"), py::arg("sign"));
    m.def("make_g", &make_g, py::arg("recipe"));
    m.def("inner_product", &inner_product);
    m.def("free_evolve", &free_evolve, py::arg("packet"), py::arg("t"), py::arg("consts") = PhysicalConstants{});

    py::class_<SuperposedState>(m, "SuperposedState")
        .def("__call__", [](const SuperposedState& s, double x) { return s(x); })
        .def("norm_squared", &SuperposedState::norm_squared);
    m.def("compose_psi", &compose_psi, py::arg("recipe"), py::arg("labeled") = false);
    m.def("compose_phi", &compose_phi, py::arg("recipe"), py::arg("labeled") = false);
    m.def("overlap", &overlap);

    m.def(
        "packet_weak_values",
        [](const PacketRecipe& r, bool labeled) {
            const auto t = packet_projector_weak_values(compose_psi(r, labeled), compose_phi(r, labeled));
            py::dict d;
            d["g"] = packet_row(t.g());
            d["f+"] = packet_row(t.f_plus());
            d["f-"] = packet_row(t.f_minus());
            return d;
        },
        py::arg("recipe"), py::arg("labeled") = false);

    m.def(
        "interval_weak_value",
        [](const PacketRecipe& r, double lo, double hi, const std::string& kind, bool labeled) {
            const ObservableKind k = kind == "presence"   ? ObservableKind::presence
                                     : kind == "momentum" ? ObservableKind::momentum
                                     : kind == "energy"   ? ObservableKind::kinetic_energy
                                                          : throw InvalidArgument("unknown observable " + kind);
            const LocalObservable obs{RegionProjector::interval(lo, hi), k};
            return weak_value(obs, compose_psi(r, labeled), compose_phi(r, labeled)).value;
        },
        py::arg("recipe"), py::arg("lo"), py::arg("hi"), py::arg("kind") = "presence", py::arg("labeled") = false);

    m.def(
        "tune",
        [](const PacketRecipe& r) {
            TuningReport rep{};
            tune_splitters(nested_scenario(r), &rep);
            py::dict d;
            d["first_reflected_fraction"] = rep.first_reflected_fraction;
            d["final_transmitted_fraction"] = rep.final_transmitted_fraction;
            d["reflectivities"] = rep.reflectivities;
            d["forward_fidelity"] = rep.forward_fidelity;
            d["backward_fidelity"] = rep.backward_fidelity;
            return d;
        },
        py::arg("recipe"));

    py::class_<PointerConfig>(m, "PointerConfig")
        .def(py::init([](double width, double deflection) {
                 PointerConfig c{width, deflection};
                 c.validate();
                 return c;
             }),
             py::arg("width"), py::arg("deflection"))
        .def_readonly("width", &PointerConfig::width)
        .def_readonly("deflection", &PointerConfig::deflection);

    py::class_<ProbeSelection>(m, "ProbeSelection")
        .def("weak_value", &ProbeSelection::weak_value);
    m.def("selection_for_weak_value", &selection_for_weak_value, py::arg("weak_value"));

    py::class_<EnsembleResult>(m, "EnsembleResult")
        .def_readonly("n_samples", &EnsembleResult::n_samples)
        .def_readonly("n_postselected", &EnsembleResult::n_postselected)
        .def_readonly("mean", &EnsembleResult::mean)
        .def_readonly("std_error", &EnsembleResult::std_error)
        .def_readonly("estimated_weak_value", &EnsembleResult::estimated_weak_value)
        .def_readonly("ci95", &EnsembleResult::ci95)
        .def_readonly("exact_mean", &EnsembleResult::exact_mean)
        .def_readonly("probability", &EnsembleResult::probability)
        .def_readonly("seed", &EnsembleResult::seed);
    m.def("sample_ensemble", &sample_ensemble, py::arg("selection"), py::arg("config"), py::arg("n"),
          py::arg("seed"), py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<RunConfig>(m, "RunConfig")
        .def_readwrite("seed", &RunConfig::seed)
        .def_readwrite("labeled", &RunConfig::labeled)
        .def_readonly("recipe", &RunConfig::recipe)
        .def("to_text", &to_config_text);
    m.def("load_config", &load_run_config, py::arg("path"));
    m.def("parse_config", [](const std::string& text) { return parse_run_config(text); }, py::arg("text"));

    using Cmd = CommandResult (*)(const RunConfig&);
    for (const auto& [name, fn] : {std::pair<const char*, Cmd>{"weak_values", cmd_weak_values},
                                   {"interferometer", cmd_interferometer},
                                   {"trace_map", cmd_trace_map},
                                   {"pointer", cmd_pointer},
                                   {"validate", cmd_validate}}) {
        m.def(name, [fn](const RunConfig& c) { return artifacts(fn(c)); }, py::arg("config"));
    }
}
