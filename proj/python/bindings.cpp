#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "trapwave/commands.hpp"
#include "trapwave/errors.hpp"
#include "trapwave/exclusion_set.hpp"
#include "trapwave/layer_operators.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/quasimode_catalog.hpp"
#include "trapwave/resonance_finder.hpp"
#include "trapwave/scaling_and_bounds.hpp"
#include "trapwave/special_functions.hpp"

namespace py = pybind11;
using namespace trapwave;

namespace {

// Orders cross the boundary as floats; Order() rejects non-(half-)integers.
Order order(double nu) { return Order(nu); }

py::object to_python(const Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Resonances and resolvent norms of radial scatterers";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("cyl_bessel_j", [](double nu, Complex z) { return cyl_bessel_j(order(nu), z); });
    m.def("cyl_bessel_y", [](double nu, Complex z) { return cyl_bessel_y(order(nu), z); });
    m.def("cyl_hankel1", [](double nu, Complex z) { return cyl_hankel1(order(nu), z); });
    m.def("sph_bessel", &sph_bessel, py::arg("ell"), py::arg("z"));
    m.def("sph_hankel1", &sph_hankel1, py::arg("ell"), py::arg("z"));
    m.def("airy_ai", &airy_ai);
    m.def("airy_neg_zeros", &airy_neg_zeros, py::arg("count"));

    py::enum_<ScattererKind>(m, "ScattererKind")
        .value("Free", ScattererKind::Free)
        .value("Dirichlet", ScattererKind::ImpenetrableDirichlet)
        .value("Neumann", ScattererKind::ImpenetrableNeumann)
        .value("Penetrable", ScattererKind::Penetrable);

    py::class_<ScattererSpec>(m, "ScattererSpec")
        .def_readonly("dimension", &ScattererSpec::dimension)
        .def_readonly("kind", &ScattererSpec::kind)
        .def_readonly("radius", &ScattererSpec::radius)
        .def_readonly("contrast", &ScattererSpec::contrast)
        .def_readonly("alpha", &ScattererSpec::alpha)
        .def_static("free_space", &ScattererSpec::free_space, py::arg("dimension") = 3)
        .def_static("dirichlet", &ScattererSpec::dirichlet, py::arg("radius"),
                    py::arg("dimension") = 3)
        .def_static("neumann", &ScattererSpec::neumann, py::arg("radius"),
                    py::arg("dimension") = 3)
        .def_static("penetrable", &ScattererSpec::penetrable, py::arg("radius"),
                    py::arg("contrast"), py::arg("alpha") = 1.0, py::arg("dimension") = 3)
        .def("__repr__", [](const ScattererSpec& s) { return spec_to_json(s).dump(); });

    m.def("is_trapping", [](const ScattererSpec& s) {
        return classify(s).label == TrappingClass::Trapping;
    });
    m.def("modal_determinant", &modal_determinant, py::arg("spec"), py::arg("ell"), py::arg("k"));
    m.def(
        "resolvent_norm",
        [](const ScattererSpec& s, Complex k, double r_chi) {
            ResolventOptions o;
            o.r_chi = r_chi;
            const ResolventEstimate e = resolvent_norm(s, k, o);
            return py::make_tuple(e.norm, e.argmax_mode);
        },
        py::arg("spec"), py::arg("k"), py::arg("r_chi") = 0.0,
        "(norm, argmax_mode) of the cut-off outgoing resolvent at k.");
    m.def("semiclassical_resolvent_norm",
          [](const ScattererSpec& s, Complex z, double h) {
              return semiclassical_resolvent_norm(s, z, h);
          });

    py::class_<Resonance>(m, "Resonance")
        .def_readonly("k", &Resonance::k)
        .def_readonly("ell", &Resonance::ell)
        .def_readonly("multiplicity", &Resonance::multiplicity)
        .def_readonly("residual", &Resonance::residual)
        .def("__repr__", [](const Resonance& r) { return resonance_to_json(r).dump(); });

    py::class_<ResonanceCatalog>(m, "ResonanceCatalog")
        .def_readonly("spec", &ResonanceCatalog::spec)
        .def_readonly("k_max", &ResonanceCatalog::k_max)
        .def_readonly("strip_depth", &ResonanceCatalog::strip_depth)
        .def_readonly("entries", &ResonanceCatalog::entries)
        .def("__len__", [](const ResonanceCatalog& c) { return c.entries.size(); })
        .def("to_jsonl", &catalog_to_jsonl);

    m.def("find_resonances",
          [](const ScattererSpec& s, double k_max, double strip_depth, int ell_max) {
              return find_resonances(s, k_max, strip_depth, ell_max);
          },
          py::arg("spec"), py::arg("k_max"), py::arg("strip_depth") = 3.0, py::arg("ell_max") = -1);
    m.def("count_in_box",
          [](const ScattererSpec& s, int ell, double re_lo, double re_hi, double im_lo,
             double im_hi) { return count_in_box(s, ell, SearchBox{re_lo, re_hi, im_lo, im_hi}); });
    m.def("refine_resonance", [](const ScattererSpec& s, int ell, Complex guess) {
        const NewtonResult r = refine_resonance(s, ell, guess);
        if (!r.converged) throw NumericalError("Newton iteration did not converge");
        return r.k;
    });

    py::enum_<ExclusionVariant>(m, "ExclusionVariant")
        .value("Dyadic", ExclusionVariant::Dyadic)
        .value("Refined", ExclusionVariant::Refined);

    m.def(
        "exclusion_set",
        [](const ResonanceCatalog& cat, double delta, ExclusionVariant variant,
           std::optional<double> p, double rho) {
            ExclusionParams params;
            params.delta = delta;
            params.variant = variant;
            params.p = p;
            params.rho = rho;
            return to_python(exclusion_to_json(build_exclusion_set(cat, params, cat.k_max)));
        },
        py::arg("catalog"), py::arg("delta") = 0.5, py::arg("variant") = ExclusionVariant::Dyadic,
        py::arg("p") = py::none(), py::arg("rho") = 0.0,
        "Exclusion set as a dict {intervals, measure, tail_bound, params}.");

    m.def("box_image_violations", [](double h, double c1, double c2, int samples) {
        return box_image_contains(h, c1, c2, samples).violations;
    });

    m.def(
        "layer_inverse_norms",
        [](const std::string& curve, double radius, double gap, double k, int points) {
            const Curve c = curve == "two_circles" ? Curve::two_circles(radius, gap, points)
                                                   : Curve::circle(radius, points);
            return py::make_tuple(inv_norm(assemble(c, k, k, LayerTag::A)).value,
                                  inv_norm(assemble(c, k, k, LayerTag::Aprime)).value);
        },
        py::arg("curve"), py::arg("radius"), py::arg("gap"), py::arg("k"), py::arg("points"),
        "(||A^-1||, ||A'^-1||) with coupling eta = k.");

    m.def(
        "certify",
        [](const ResonanceCatalog& cat, int top_n, double k_max) {
            CertifyOptions o;
            o.top_n = top_n;
            o.k_max = k_max;
            return to_python(certificates_to_json(certify(cat, o), cat.spec.radius));
        },
        py::arg("catalog"), py::arg("top_n") = 10,
        py::arg("k_max") = std::numeric_limits<double>::infinity());

    m.def(
        "run_command",
        [](const std::string& command, const std::filesystem::path& config,
           const std::filesystem::path& out) {
            py::gil_scoped_release release;
            return run_command(command, config, out);
        },
        py::arg("command"), py::arg("config"), py::arg("out"),
        "Runs a trapped-wave subcommand in process and returns its exit code.");
}
