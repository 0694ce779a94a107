#pragma once

#include <string>

#include "trapwave/json.hpp"
#include "trapwave/special_functions.hpp"

namespace trapwave {

enum class ScattererKind { Free, ImpenetrableDirichlet, ImpenetrableNeumann, Penetrable };

/// One radially symmetric scattering configuration.
///
/// Inside the ball of radius `radius` a penetrable scatterer solves
/// -c^2 Lap u - k^2 u = f with u continuous and d_r u_in = alpha d_r u_out on
/// the interface. Free space carries a nominal radius of 1, used only as the
/// length scale for grids and search boxes.
struct ScattererSpec {
    int dimension = 3;
    ScattererKind kind = ScattererKind::Free;
    double radius = 1.0;
    double contrast = 1.0;
    double alpha = 1.0;

    static ScattererSpec free_space(int dimension = 3);
    static ScattererSpec dirichlet(double radius, int dimension = 3);
    static ScattererSpec neumann(double radius, int dimension = 3);
    static ScattererSpec penetrable(double radius, double contrast, double alpha,
                                    int dimension = 3);

    /// Throws ConfigError when an invariant is violated.
    void validate() const;

    bool is_penetrable() const { return kind == ScattererKind::Penetrable; }
    bool is_impenetrable() const {
        return kind == ScattererKind::ImpenetrableDirichlet ||
               kind == ScattererKind::ImpenetrableNeumann;
    }
    BesselFamily family() const {
        return dimension == 3 ? BesselFamily::Spherical : BesselFamily::Cylindrical;
    }

    bool operator==(const ScattererSpec&) const = default;
};

enum class TrappingClass { Nontrapping, Trapping };

struct Classification {
    TrappingClass label = TrappingClass::Nontrapping;
    /// The spec after normalization (a c = 1, alpha = 1 penetrable ball becomes Free).
    ScattererSpec effective;
    /// Non-empty when the input was normalized.
    std::string warning;
};

Classification classify(const ScattererSpec& spec);

/// k / c for a penetrable scatterer; NotApplicableError otherwise.
Complex interior_wavenumber(const ScattererSpec& spec, Complex k);

/// Angular mode multiplicity: 2l + 1 in 3-d; 1 for l = 0 and 2 otherwise in 2-d.
int mode_multiplicity(int dimension, int ell);

std::string to_string(ScattererKind kind);
std::string to_string(TrappingClass label);

/// Strict JSON round trip: unknown keys, missing kind, and parameters that the
/// kind does not admit are ConfigErrors.
ScattererSpec spec_from_json(const Json& j);
Json spec_to_json(const ScattererSpec& spec);

}  // namespace trapwave
