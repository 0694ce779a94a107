#include <doctest.h>

#include <cmath>

#include "trapwave/quasimode_catalog.hpp"

using namespace trapwave;

namespace {
const ScattererSpec kBall = ScattererSpec::penetrable(1.0, 0.5, 1.0);

Resonance resonance(Complex k, int ell) {
    Resonance r;
    r.k = k;
    r.ell = ell;
    r.multiplicity = 2 * ell + 1;
    return r;
}
}  // namespace

TEST_CASE("quasimode bound below the direct norm") {
    const Resonance r = resonance({22.96827350413357, -3.675737812306626e-13}, 40);
    QuasimodeOptions o;
    o.r_chi = 6.0;
    const QuasimodeBound b = quasimode_lower_bound(kBall, r, o);
    CHECK_FALSE(b.vacuous);
    CHECK(b.lower_bound >= 1e2);
    CHECK(b.fd_mismatch_flat < 1e-6);
    ResolventOptions ro;
    ro.r_chi = 6.0;
    const double direct = resolvent_norm(kBall, Complex(r.k.real(), 0.0), ro).norm;
    CHECK(b.lower_bound <= direct * 1.05);
}

TEST_CASE("wider cut-off helps until the turning point") {
    const Resonance r = resonance({22.96827350413357, -3.675737812306626e-13}, 40);
    double prev = 0.0;
    for (double rc : {2.0, 3.0, 4.0}) {
        QuasimodeOptions o;
        o.r_chi = rc;
        const double lb = quasimode_lower_bound(kBall, r, o).lower_bound;
        CHECK(lb > prev);
        prev = lb;
    }
}

TEST_CASE("precondition and cap") {
    const QuasimodeBound v = quasimode_lower_bound(kBall, resonance({5.0, -0.5}, 3));
    CHECK(v.vacuous);
    CHECK(v.lower_bound == 0.0);
    const QuasimodeBound c = bound_from_norms(1.0, 1e-20, 1e14);
    CHECK(c.capped);
    CHECK(c.lower_bound == 1e14);
    CHECK(bound_from_norms(2.0, 0.5).lower_bound == 4.0);
}

TEST_CASE("certificates are consistent and sorted") {
    ResonanceCatalog cat;
    cat.spec = kBall;
    cat.k_max = 25.0;
    cat.entries = {resonance({12.33404942270727, -2.272505156983902e-6}, 20),
                   resonance({22.96827350413357, -3.675737812306626e-13}, 40)};
    CertifyOptions o;
    o.r_chi_factors = {2.0, 3.0};
    const CertifyResult res = certify(cat, o);
    REQUIRE(res.certificates.size() == 2);
    CHECK(res.certificates[0].lower_bound >= res.certificates[1].lower_bound);
    for (const auto& c : res.certificates) {
        CHECK(c.consistent);
        CHECK(c.lower_bound <= c.direct_norm * 1.05);
    }
    const Json j = certificates_to_json(res, 1.0);
    CHECK(j.contains("certificates"));
}
