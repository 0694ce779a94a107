#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "trapwave/resonance_finder.hpp"

using namespace trapwave;

namespace {
// Penetrable ball a = 1, c = 0.5, alpha = 1; roots from mpmath findroot.
const ScattererSpec kBall = ScattererSpec::penetrable(1.0, 0.5, 1.0);
}  // namespace

TEST_CASE("Dirichlet ball roots are the zeros of h_l") {
    const ScattererSpec d = ScattererSpec::dirichlet(1.0);
    CHECK(count_in_box(d, 0, SearchBox{-3.0, 3.0, -3.0, -0.1}) == 0);
    const auto r1 = find_resonances_in_box(d, 1, SearchBox{-0.5, 0.5, -1.5, -0.5});
    REQUIRE(r1.size() == 1);
    CHECK(std::abs(r1[0].k - Complex(0.0, -1.0)) < 1e-10);
    // h_2 vanishes where z^2 + 3iz - 3 = 0.
    auto r2 = find_resonances_in_box(d, 2, SearchBox{-2.0, 2.0, -2.5, -0.5});
    REQUIRE(r2.size() == 2);
    std::sort(r2.begin(), r2.end(), [](auto& a, auto& b) { return a.k.real() < b.k.real(); });
    CHECK(std::abs(r2[0].k - Complex(-std::sqrt(3.0) / 2.0, -1.5)) < 1e-10);
    CHECK(std::abs(r2[1].k - Complex(std::sqrt(3.0) / 2.0, -1.5)) < 1e-10);
}

TEST_CASE("near-real roots of the penetrable ball") {
    struct Case {
        int ell;
        Complex k;
        double im_tol;
    };
    const Case cases[] = {
        {20, {12.33404942270727, -2.272505156983902e-6}, 1e-15},
        {40, {22.96827350413357, -3.675737812306626e-13}, 1e-20},
        {70, {38.60259339010898, -6.777307009e-24}, 1e-30},
    };
    for (const auto& c : cases) {
        const NewtonResult r = refine_resonance(kBall, c.ell, Complex(c.k.real() + 1e-4, -1e-3));
        CAPTURE(c.ell);
        REQUIRE(r.converged);
        CHECK(std::fabs(r.k.real() - c.k.real()) < 1e-11);
        CHECK(std::fabs(r.k.imag() - c.k.imag()) < std::max(c.im_tol, 1e-3 * std::fabs(c.k.imag())));
    }
}

TEST_CASE("catalog bookkeeping") {
    const ResonanceCatalog cat = find_resonances(kBall, 10.0, 2.0);
    REQUIRE_FALSE(cat.entries.empty());
    for (const auto& e : cat.entries) {
        CHECK(e.multiplicity == 2 * e.ell + 1);
        CHECK(e.k.imag() < 0.0);
        CHECK(e.k.imag() >= -2.0);
        CHECK(e.k.real() <= 10.0);
    }
    const auto back = catalog_from_jsonl(catalog_to_jsonl(cat), 3);
    REQUIRE(back.size() == cat.entries.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].k == cat.entries[i].k);
        CHECK(back[i].ell == cat.entries[i].ell);
    }
    const auto n = counting_function(cat, 5.0);
    CHECK(n.count > 0);
}
