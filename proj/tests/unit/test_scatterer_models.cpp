#include <doctest.h>

#include <cmath>

#include "trapwave/errors.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/scatterer_models.hpp"

using namespace trapwave;

TEST_CASE("classification") {
    CHECK(classify(ScattererSpec::penetrable(1.0, 0.5, 1.0)).label == TrappingClass::Trapping);
    CHECK(classify(ScattererSpec::penetrable(1.0, 2.0, 1.0)).label == TrappingClass::Nontrapping);
    CHECK(classify(ScattererSpec::dirichlet(1.0)).label == TrappingClass::Nontrapping);
    const auto c = classify(ScattererSpec::penetrable(1.0, 1.0, 1.0));
    CHECK(c.effective.kind == ScattererKind::Free);
    CHECK_FALSE(c.warning.empty());
}

TEST_CASE("spec validation and JSON") {
    CHECK_THROWS_AS(ScattererSpec::penetrable(-1.0, 0.5, 1.0).validate(), ConfigError);
    CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"kind": "penetrable", "radius": 1})")),
                    ConfigError);
    CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"kind": "free", "radius": 1})")), ConfigError);
    CHECK_THROWS_AS(spec_from_json(Json::parse(R"({"kind": "dirichlet", "radius": 1, "x": 0})")),
                    ConfigError);
    const auto s = ScattererSpec::penetrable(2.0, 0.5, 3.0, 2);
    CHECK(spec_from_json(spec_to_json(s)) == s);
    CHECK(interior_wavenumber(s, Complex(3.0, 0.0)) == Complex(6.0, 0.0));
    CHECK_THROWS_AS(interior_wavenumber(ScattererSpec::dirichlet(1.0), 1.0), NotApplicableError);
    CHECK(mode_multiplicity(3, 4) == 9);
    CHECK(mode_multiplicity(2, 0) == 1);
    CHECK(mode_multiplicity(2, 3) == 2);
}

TEST_CASE("modal determinant closed forms") {
    const Complex k(2.5, -0.3);
    CHECK(std::abs(modal_determinant(ScattererSpec::free_space(), 3, k) - Complex(0.0, -1.0) / k) <
          1e-13);
    // h_1(z) = -e^{iz}(z + i)/z^2 vanishes at z = -i.
    CHECK(std::abs(modal_determinant(ScattererSpec::dirichlet(1.0), 1, Complex(0.0, -1.0))) < 1e-14);
}

TEST_CASE("outgoing Robin coefficient for l = 0") {
    // h_0(z) = -i e^{iz} / z, so k h_0'(kr) / h_0(kr) = i k - 1 / r.
    const ComplexL c = outgoing_robin(ScattererSpec::free_space(), 0, ComplexL(3.0L, 0.0L), 2.0);
    CHECK(std::abs(Complex(c) - Complex(-0.5, 3.0)) < 1e-14);
}

TEST_CASE("free resolvent decays like 1/k and respects 1/Im z") {
    const auto free = ScattererSpec::free_space();
    const double n8 = resolvent_norm(free, Complex(8.0, 0.0)).norm;
    const double n16 = resolvent_norm(free, Complex(16.0, 0.0)).norm;
    CHECK(n8 / n16 == doctest::Approx(2.0).epsilon(0.1));
    const Complex z(1.3, 0.4);
    CHECK(semiclassical_resolvent_norm(ScattererSpec::dirichlet(1.0), z, 0.2) * z.imag() <= 1.01);
}

TEST_CASE("resolvent input checks") {
    CHECK_THROWS_AS(resolvent_norm(ScattererSpec::free_space(), Complex(2.0, -0.1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(semiclassical_resolvent_norm(ScattererSpec::free_space(), Complex(1.0, 0.0), 0.1),
                    std::invalid_argument);
}
