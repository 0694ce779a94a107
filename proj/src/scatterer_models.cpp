#include "trapwave/scatterer_models.hpp"

#include <cmath>
#include <set>

#include "trapwave/errors.hpp"

namespace trapwave {

ScattererSpec ScattererSpec::free_space(int dimension) {
    ScattererSpec s;
    s.dimension = dimension;
    s.kind = ScattererKind::Free;
    return s;
}

ScattererSpec ScattererSpec::dirichlet(double radius, int dimension) {
    ScattererSpec s;
    s.dimension = dimension;
    s.kind = ScattererKind::ImpenetrableDirichlet;
    s.radius = radius;
    return s;
}

ScattererSpec ScattererSpec::neumann(double radius, int dimension) {
    ScattererSpec s = dirichlet(radius, dimension);
    s.kind = ScattererKind::ImpenetrableNeumann;
    return s;
}

ScattererSpec ScattererSpec::penetrable(double radius, double contrast, double alpha,
                                        int dimension) {
    ScattererSpec s;
    s.dimension = dimension;
    s.kind = ScattererKind::Penetrable;
    s.radius = radius;
    s.contrast = contrast;
    s.alpha = alpha;
    return s;
}

void ScattererSpec::validate() const {
    if (dimension != 2 && dimension != 3) throw ConfigError("dimension must be 2 or 3");
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(radius)) throw ConfigError("radius must be positive and finite");
    if (!positive(contrast)) throw ConfigError("contrast must be positive and finite");
    if (!positive(alpha)) throw ConfigError("alpha must be positive and finite");
    if (kind == ScattererKind::Free && radius != 1.0)
        throw ConfigError("free space admits no radius");
    if (kind != ScattererKind::Penetrable && (contrast != 1.0 || alpha != 1.0))
        throw ConfigError("contrast and alpha apply only to penetrable scatterers");
}

Classification classify(const ScattererSpec& spec) {
    spec.validate();
    Classification out;
    out.effective = spec;
    if (spec.is_penetrable() && spec.contrast == 1.0 && spec.alpha == 1.0) {
        out.effective = ScattererSpec::free_space(spec.dimension);
        out.warning = "penetrable scatterer with c = 1 and alpha = 1 is free space";
    }
    const ScattererSpec& s = out.effective;
    out.label = (s.is_penetrable() && s.contrast < 1.0) ? TrappingClass::Trapping
                                                         : TrappingClass::Nontrapping;
    return out;
}

Complex interior_wavenumber(const ScattererSpec& spec, Complex k) {
    if (!spec.is_penetrable())
        throw NotApplicableError("interior wavenumber needs a penetrable scatterer");
    return k / spec.contrast;
}

int mode_multiplicity(int dimension, int ell) {
    if (dimension == 3) return 2 * ell + 1;
    return ell == 0 ? 1 : 2;
}

std::string to_string(ScattererKind kind) {
    switch (kind) {
        case ScattererKind::Free: return "free";
        case ScattererKind::ImpenetrableDirichlet: return "dirichlet";
        case ScattererKind::ImpenetrableNeumann: return "neumann";
        case ScattererKind::Penetrable: return "penetrable";
    }
    return "unknown";
}

std::string to_string(TrappingClass label) {
    return label == TrappingClass::Trapping ? "trapping" : "nontrapping";
}

ScattererSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("scatterer must be a JSON object");
    static const std::set<std::string> known{"dimension", "kind", "radius", "contrast", "alpha"};
    for (const auto& item : j.items())
        if (!known.count(item.key())) throw ConfigError("unknown scatterer key: " + item.key());
    if (!j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("scatterer.kind must be a string");

    const std::string kind = j["kind"].get<std::string>();
    ScattererSpec s;
    if (kind == "free") s.kind = ScattererKind::Free;
    else if (kind == "dirichlet") s.kind = ScattererKind::ImpenetrableDirichlet;
    else if (kind == "neumann") s.kind = ScattererKind::ImpenetrableNeumann;
    else if (kind == "penetrable") s.kind = ScattererKind::Penetrable;
    else throw ConfigError("unknown scatterer kind: " + kind);

    auto number = [&](const char* key, double& dst) {
        if (!j.contains(key)) return false;
        if (!j[key].is_number()) throw ConfigError(std::string("scatterer.") + key + " must be a number");
        dst = j[key].get<double>();
        return true;
    };
    if (j.contains("dimension")) {
        if (!j["dimension"].is_number_integer()) throw ConfigError("scatterer.dimension must be 2 or 3");
        s.dimension = j["dimension"].get<int>();
    }
    const bool has_radius = number("radius", s.radius);
    const bool has_contrast = number("contrast", s.contrast);
    const bool has_alpha = number("alpha", s.alpha);
    if (s.kind == ScattererKind::Free && (has_radius || has_contrast || has_alpha))
        throw ConfigError("free space admits no radius, contrast or alpha");
    if (s.kind != ScattererKind::Free && !has_radius) throw ConfigError("scatterer.radius is required");
    if (s.kind != ScattererKind::Penetrable && (has_contrast || has_alpha))
        throw ConfigError("contrast and alpha apply only to penetrable scatterers");
    if (s.kind == ScattererKind::Penetrable && !has_contrast)
        throw ConfigError("scatterer.contrast is required for penetrable scatterers");
    s.validate();
    return s;
}

Json spec_to_json(const ScattererSpec& spec) {
    Json j;
    j["dimension"] = spec.dimension;
    j["kind"] = to_string(spec.kind);
    if (spec.kind != ScattererKind::Free) j["radius"] = spec.radius;
    if (spec.is_penetrable()) {
        j["contrast"] = spec.contrast;
        j["alpha"] = spec.alpha;
    }
    return j;
}

}  // namespace trapwave
