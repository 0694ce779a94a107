#include <doctest.h>

#include <cmath>
#include <random>

#include "trapwave/errors.hpp"
#include "trapwave/exclusion_set.hpp"
#include "trapwave/scaling_and_bounds.hpp"

using namespace trapwave;

namespace {

ResonanceCatalog toy_catalog() {
    ResonanceCatalog c;
    c.spec = ScattererSpec::penetrable(1.0, 0.5, 1.0);
    c.k_max = 30.0;
    c.strip_depth = 3.0;
    for (const Complex k : {Complex(5.2, -1e-3), Complex(11.7, -1e-8), Complex(19.4, -0.2),
                            Complex(27.05, -1e-15)}) {
        Resonance r;
        r.k = k;
        r.ell = 1;
        r.multiplicity = 3;
        c.entries.push_back(r);
    }
    return c;
}

}  // namespace

TEST_CASE("partition covers the interval exactly") {
    const auto p = partition_interval(1.0, 2.0, 0.3);
    REQUIRE(p.size() == 4);
    CHECK(p.front().lo == 1.0);
    CHECK(p.back().hi == 2.0);
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i].lo == p[i - 1].hi);
}

TEST_CASE("exclusion budget, containment and JSON round trip") {
    const ResonanceCatalog cat = toy_catalog();
    for (const auto variant : {ExclusionVariant::Dyadic, ExclusionVariant::Refined}) {
        ExclusionParams p;
        p.variant = variant;
        if (variant == ExclusionVariant::Refined) p.p = 3.0;
        for (const double delta : {0.1, 1.0}) {
            p.delta = delta;
            const ExclusionSet J = build_exclusion_set(cat, p, cat.k_max);
            CAPTURE(to_string(variant));
            CHECK(J.measure + J.tail_bound <= delta);
            CHECK(measure(J) == doctest::Approx(J.measure));
            for (std::size_t i = 1; i < J.intervals.size(); ++i)
                CHECK(J.intervals[i].lo > J.intervals[i - 1].hi);
            // Near-real entries inside fully covered windows are excluded.
            CHECK(contains(J, 11.7));
            CHECK_FALSE(contains(J, 3.0));
            const ExclusionSet back = exclusion_from_json(exclusion_to_json(J));
            CHECK(back.intervals == J.intervals);
            CHECK(back.tail_bound == J.tail_bound);
        }
    }
}

TEST_CASE("coverage reach") {
    ExclusionParams p;
    const double reach = coverage_k_max(p, 40.0);
    // Windows are dyadic in k^2, so the window containing 40 ends below 40 sqrt(2).
    CHECK(reach >= 40.0);
    CHECK(reach <= 40.0 * std::sqrt(2.0) * 1.01);
}

TEST_CASE("exponent predictions") {
    ExclusionParams p;
    p.n_sharp = 3;
    p.eps = 0.1;
    CHECK(exponent_prediction(p).exponent == doctest::Approx(7.6));
    p.variant = ExclusionVariant::Refined;
    p.p = 3.0 - 1.0 / 3.0;
    p.rho = 1.0;
    CHECK(exponent_prediction(p).exponent == doctest::Approx(6.0 + 1.0 / 6.0 + 0.1));
}

TEST_CASE("parameter parsing is strict") {
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"delta": 0.5, "bogus": 1})")), ConfigError);
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"variant": "triadic"})")), ConfigError);
    const auto p = params_from_json(Json::parse(R"({"variant": "refined", "p": 2.5, "delta": 0.2})"));
    CHECK(p.variant == ExclusionVariant::Refined);
    CHECK(*p.p == 2.5);
}

TEST_CASE("box image containment") {
    const auto r = box_image_contains(0.1, 0.7, 1.1, 2000, 3);
    CHECK(r.contained);
    CHECK(r.samples == 2004);  // plus the four corners
    CHECK_THROWS_AS(box_image_contains(0.1, 0.6, 1.1, 10, 1), std::invalid_argument);
    // Image of z = 1 is exactly 1/h.
    CHECK(box_image(0.25, 1.0) == Complex(4.0, 0.0));
}

TEST_CASE("envelope fit recovers a power law") {
    std::vector<double> k, n;
    for (int i = 0; i < 60; ++i) {
        k.push_back(2.0 * std::pow(2.0, i / 12.0));
        n.push_back(3.0 * std::pow(k.back(), -1.0));
    }
    const EnvelopeFit f = fit_envelope(k, n);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
    CHECK(f.within(-0.99));
    CHECK_THROWS_AS(fit_envelope({2.0, 3.0}, {1.0, 1.0}), InsufficientDataError);
}

TEST_CASE("smoothstep cut-off") {
    const SmoothCutoff c{1.0, 2.0};
    double f, df, d2f;
    c.eval(0.5, f, df, d2f);
    CHECK(f == 1.0);
    c.eval(1.5, f, df, d2f);
    CHECK(f == doctest::Approx(0.5));
    c.eval(2.0, f, df, d2f);
    CHECK(f == doctest::Approx(0.0));
    CHECK(df == doctest::Approx(0.0));
    CHECK(d2f == doctest::Approx(0.0));
}
