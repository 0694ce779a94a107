#include <doctest.h>

#include <cmath>
#include <numbers>

#include "trapwave/layer_operators.hpp"

using namespace trapwave;

TEST_CASE("single layer on the unit circle, mode 0") {
    const Curve c = Curve::circle(1.0, 512);
    const auto S = assemble(c, 5.0, 0.0, LayerTag::S);
    // (i pi / 2) J_0(5) H_0(5) from mpmath.
    const Complex exact(-0.08606665472237152, 0.04954387933000920);
    CHECK(std::abs(S.m.row(0).sum() - exact) < 1e-10);
}

TEST_CASE("double layer of a constant is -1/2 for small k") {
    const Curve c = Curve::circle(1.0, 64);
    const auto D = assemble(c, 1e-4, 0.0, LayerTag::D);
    for (int i : {0, 17, 40}) CHECK(std::abs(D.m.row(i).sum() - Complex(-0.5, 0.0)) < 1e-6);
}

TEST_CASE("operators on a circle are circulant") {
    const Curve c = Curve::circle(1.5, 160);
    const auto A = assemble(c, 3.0, 3.0, LayerTag::A);
    double worst = 0.0;
    for (int i = 0; i < 159; ++i)
        for (int j = 0; j < 159; ++j)
            worst = std::max(worst, std::abs(A.m(i + 1, j + 1) - A.m(i, j)));
    CHECK(worst < 1e-13);
}

TEST_CASE("inverse norms") {
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(8, 8);
    CHECK(inv_norm(combine(zero, zero, 1.0)).value == doctest::Approx(2.0));

    const Curve c = Curve::circle(1.0, 256);
    const double a = inv_norm(assemble(c, 5.0, 5.0, LayerTag::A)).value;
    const double ap = inv_norm(assemble(c, 5.0, 5.0, LayerTag::Aprime)).value;
    CHECK(a >= 1.0);
    CHECK(a <= 50.0);
    CHECK(std::fabs(a - ap) / a < 1e-3);

    // Without coupling the operator fails at interior Neumann eigenvalues (J_0' = J_1 = 0).
    const auto bad = inv_norm(assemble(c, 3.831705970207512, 0.0, LayerTag::A));
    CHECK((bad.singular || bad.value > 1e6));
}

TEST_CASE("curves and point counts") {
    const Curve t = Curve::two_circles(1.0, 0.5, 64);
    CHECK(t.size() == 64);
    CHECK(t.components == 2);
    CHECK(t.diameter() == doctest::Approx(4.5));
    const int n = required_points(t, 10.0);
    CHECK(n % 4 == 0);
    CHECK(n >= 16 * 10 * 4.5);
    CHECK_THROWS_AS(assemble_layers(Curve::circle(1.0, 16), 40.0), std::invalid_argument);
}

TEST_CASE("spike detection") {
    const std::vector<double> ks{1, 2, 3, 4, 5, 6, 7};
    const std::vector<double> v{1, 1.1, 1, 50, 1, 1.2, 1};
    const auto f = detect_spikes(ks, v, 10.0, 2.5);
    CHECK(f[3]);
    CHECK_FALSE(f[1]);
    CHECK_FALSE(f[5]);
}
