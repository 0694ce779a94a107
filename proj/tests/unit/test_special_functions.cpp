#include <doctest.h>

#include <cmath>

#include "trapwave/errors.hpp"
#include "trapwave/special_functions.hpp"

using namespace trapwave;

namespace {
// Reference values from mpmath at 30 digits.
const Complex kH0at5(-0.1775967713143383, -0.3085176252490338);
const Complex kSphH7(-2.211818687296925, 10.63191476757627);   // h_7(3 - 1.5i)
const Complex kJ25(0.7400361465782409, 0.4875168609538802);    // J_{5/2}(10 + 2i)

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("integer and half-integer orders against mpmath") {
    CHECK(rel(cyl_hankel1(Order::integer(0), 5.0), kH0at5) < 1e-14);
    CHECK(rel(sph_hankel1(7, Complex(3.0, -1.5)), kSphH7) < 1e-13);
    CHECK(rel(cyl_bessel_j(Order(2.5), Complex(10.0, 2.0)), kJ25) < 1e-13);
    CHECK(std::abs(cyl_bessel_j(Order::integer(0), 2.404825557695773)) < 1e-15);
}

TEST_CASE("spherical functions match half-integer cylindrical ones") {
    const Complex z(4.0, 0.7);
    const Complex scale = std::sqrt(std::numbers::pi / (2.0 * z));
    for (int ell : {0, 3, 12}) {
        CHECK(rel(sph_bessel(ell, z), scale * cyl_bessel_j(Order::half_integer(ell), z)) < 1e-13);
        CHECK(rel(sph_hankel1(ell, z), scale * cyl_hankel1(Order::half_integer(ell), z)) < 1e-13);
    }
}

TEST_CASE("large order at small argument stays finite in tables") {
    const auto t = bessel_table(BesselFamily::Spherical, 80, ComplexL(0.1L, 0.0L));
    CHECK(std::isfinite(static_cast<double>(std::abs(t.j[80] * t.h[80]))));
}

TEST_CASE("Airy zeros") {
    const auto z = airy_neg_zeros(10);
    REQUIRE(z.size() == 10);
    CHECK(z[0] == doctest::Approx(2.33810741045977).epsilon(1e-13));
    CHECK(z[1] == doctest::Approx(4.08794944413097).epsilon(1e-13));
    for (std::size_t i = 1; i < z.size(); ++i) CHECK(z[i] > z[i - 1]);
    CHECK(std::fabs(airy_ai(-z[4])) < 1e-13);
    CHECK_THROWS_AS(airy_neg_zeros(0), std::domain_error);
}

TEST_CASE("invalid orders and poles") {
    CHECK_THROWS_AS(Order(0.3), std::domain_error);
    CHECK_THROWS_AS(Order(-1.0), std::domain_error);
    CHECK_THROWS_AS(cyl_hankel1(Order::integer(1), 0.0), SingularityError);
    CHECK_THROWS_AS(sph_hankel1(2, 0.0), SingularityError);
    CHECK(sph_bessel(0, 0.0) == Complex(1.0, 0.0));
}
