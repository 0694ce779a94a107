// Acceptance run: one PASS/FAIL line per criterion, with the measured numbers.
//
// Exit status is 0 when every criterion was evaluated (whatever the verdicts)
// and 1 if one of them crashed; `--strict` makes any FAIL a nonzero exit.
// The lines are also written to acceptance_report.txt in the working directory.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "trapwave/commands.hpp"
#include "trapwave/exclusion_set.hpp"
#include "trapwave/layer_operators.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/quasimode_catalog.hpp"
#include "trapwave/resonance_finder.hpp"
#include "trapwave/scaling_and_bounds.hpp"
#include "trapwave/special_functions.hpp"

using namespace trapwave;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared penetrable catalog (c = 0.5): reaches far enough that the dyadic
// window holding k in [32, 45) is fully covered.
const ResonanceCatalog& ball_catalog() {
    static const ResonanceCatalog cat = [] {
        ExclusionParams p;
        const double k_max = std::max(40.0, coverage_k_max(p, 40.0));
        return find_resonances(ScattererSpec::penetrable(1.0, 0.5, 1.0), k_max, 3.0);
    }();
    return cat;
}

std::vector<Resonance> near_realest(int count, double k_below) {
    std::vector<Resonance> pool;
    for (const auto& e : ball_catalog().entries)
        if (e.k.real() < k_below) pool.push_back(e);
    std::stable_sort(pool.begin(), pool.end(), [](const Resonance& a, const Resonance& b) {
        return std::fabs(a.k.imag()) < std::fabs(b.k.imag());
    });
    pool.resize(std::min<std::size_t>(pool.size(), count));
    return pool;
}

Verdict c1_wronskians() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> twice_nu(0, 160);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_cyl = 0.0, worst_sph = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const int tw = twice_nu(rng);
        const double im = -3.0 + 6.0 * u01(rng);
        const double r_lo = std::max(0.1, std::fabs(im));
        const double r = r_lo + (50.0 - r_lo) * u01(rng);
        const double re = (u01(rng) < 0.5 ? -1.0 : 1.0) * std::sqrt(r * r - im * im);
        const Complex z(re, im);
        const Order nu(tw / 2.0);
        const Complex w = cyl_bessel_j(nu, z) * cyl_hankel1_prime(nu, z) -
                          cyl_bessel_j_prime(nu, z) * cyl_hankel1(nu, z);
        const Complex exact = Complex(0.0, 2.0) / (kPi * z);
        worst_cyl = std::max(worst_cyl, std::abs(w - exact) / std::abs(exact));
        const int ell = tw / 2;
        const Complex ws = sph_bessel(ell, z) * sph_hankel1_prime(ell, z) -
                           sph_bessel_prime(ell, z) * sph_hankel1(ell, z);
        const Complex es = Complex(0.0, 1.0) / (z * z);
        worst_sph = std::max(worst_sph, std::abs(ws - es) / std::abs(es));
    }
    const double t = seconds_since(t0);
    return {worst_cyl <= 1e-10 && worst_sph <= 1e-10 && t < 10.0,
            fmt("max rel residual cyl %.2e, sph %.2e over 1000 samples; %.2f s", worst_cyl,
                worst_sph, t)};
}

Verdict c2_airy() {
    const auto z = airy_neg_zeros(10);
    bool increasing = true;
    for (std::size_t i = 1; i < z.size(); ++i) increasing = increasing && z[i] > z[i - 1];
    const double err = std::fabs(z[0] - 2.33810741);
    return {err <= 1e-8 && increasing,
            fmt("alpha_1 = %.10f (|diff| %.1e), alpha_2 = %.8f, first 10 increasing: %s", z[0],
                err, z[1], increasing ? "yes" : "no")};
}

Verdict c3_nontrapping() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ks;
    for (int i = 0; i <= 30; ++i) ks.push_back(2.0 * std::pow(32.0, i / 30.0));
    auto slope_for = [&](const ScattererSpec& spec) {
        std::vector<double> n(ks.size());
        for (std::size_t i = 0; i < ks.size(); ++i)
            n[i] = resolvent_norm(spec, Complex(ks[i], 0.0)).norm;
        return fit_envelope(ks, n, nullptr, 20).slope;
    };
    const double sf = slope_for(ScattererSpec::free_space());
    const double sd = slope_for(ScattererSpec::dirichlet(1.0));
    const double t = seconds_since(t0);
    const auto ok = [](double s) { return s >= -1.15 && s <= -0.85; };
    return {ok(sf) && ok(sd) && t < 300.0,
            fmt("slopes over k in [2, 64]: free %.4f, Dirichlet ball %.4f; %.1f s", sf, sd, t)};
}

Verdict c4_upper_half_plane() {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> uh(0.05, 0.5), ure(0.5, 2.0), uim(0.1, 1.0);
    const ScattererSpec specs[] = {ScattererSpec::free_space(), ScattererSpec::dirichlet(1.0),
                                   ScattererSpec::penetrable(1.0, 0.5, 1.0)};
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) {
        const double h = uh(rng);
        const Complex z(ure(rng), uim(rng));
        const double n = semiclassical_resolvent_norm(specs[s % 3], z, h);
        worst = std::max(worst, n * z.imag());
    }
    return {worst <= 1.01, fmt("max ||R(z,h)|| Im z = %.6f over 50 samples (limit 1.01)", worst)};
}

Verdict c5_finder() {
    const ScattererSpec pen = ScattererSpec::penetrable(1.0, 0.5, 1.0);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> uell(0, 30);
    std::uniform_real_distribution<double> ure(1.0, 25.0), uw(0.5, 2.0), uim(-2.0, -0.2),
        uhi(-0.1, 0.05);
    int agree = 0, total_roots = 0;
    std::string first_mismatch;
    for (int b = 0; b < 50; ++b) {
        const int ell = uell(rng);
        const double re_lo = ure(rng), w = uw(rng);
        const SearchBox box{re_lo, re_lo + w, uim(rng), uhi(rng)};
        const int count = count_in_box(pen, ell, box);
        // Oracle: Newton from a 16 x 16 grid of starts, distinct converged roots in the box.
        std::vector<Complex> roots;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                const Complex g(box.re_lo + (i + 0.5) / 16.0 * (box.re_hi - box.re_lo),
                                box.im_lo + (j + 0.5) / 16.0 * (box.im_hi - box.im_lo));
                const NewtonResult r = refine_resonance(pen, ell, g);
                if (!r.converged || !box.contains(r.k)) continue;
                if (std::none_of(roots.begin(), roots.end(),
                                 [&](Complex q) { return std::abs(q - r.k) < 1e-7; }))
                    roots.push_back(r.k);
            }
        total_roots += static_cast<int>(roots.size());
        if (count == static_cast<int>(roots.size()))
            ++agree;
        else if (first_mismatch.empty())
            first_mismatch = fmt("; box %d (l=%d) winding %d vs %zu roots", b, ell, count,
                                 roots.size());
    }
    const ScattererSpec dir = ScattererSpec::dirichlet(1.0);
    const auto found = find_resonances_in_box(dir, 1, SearchBox{-0.5, 0.5, -1.5, -0.5});
    double err = 1.0;
    for (const auto& r : found) err = std::min(err, std::abs(r.k - Complex(0.0, -1.0)));
    return {agree == 50 && found.size() == 1 && err <= 1e-8,
            fmt("%d/50 boxes agree (%d roots in total)%s; Dirichlet l=1 root error %.1e", agree,
                total_roots, first_mismatch.c_str(), err)};
}

Verdict c6_asymptotics() {
    const ResonanceCatalog& cat = ball_catalog();
    const AsymptoticsReport rep = check_asymptotics(cat, 10, 40, 1);
    bool mult = true;
    for (const auto& e : cat.entries) mult = mult && e.multiplicity == 2 * e.ell + 1;
    const bool pass = rep.max_abs_residual <= 2.0 && std::fabs(rep.slope) <= 0.05 &&
                      rep.unmatched == 0 && mult;
    return {pass, fmt("max |r| %.3f over nu = 10.5..40.5, slope %.4f, unmatched %d, "
                      "multiplicity 2l+1 on all %zu entries: %s",
                      rep.max_abs_residual, rep.slope, rep.unmatched, cat.entries.size(),
                      mult ? "yes" : "no")};
}

Verdict c7_spikes() {
    const ScattererSpec pen = ScattererSpec::penetrable(1.0, 0.5, 1.0);
    bool pass = true;
    std::string d;
    for (const auto& r : near_realest(3, 40.0)) {
        const SpikeReport s = spike_report(pen, r);
        const double w_ratio = s.width / std::fabs(r.k.imag());
        const bool ok = s.ratio >= 1e3 && s.width_resolved && w_ratio >= 0.1 && w_ratio <= 10.0;
        pass = pass && ok;
        d += fmt("%sl=%d k=%.6f Im %.2e: peak/median %.2e, width/|Im| %.3f", d.empty() ? "" : "; ",
                 r.ell, r.k.real(), r.k.imag(), s.ratio, w_ratio);
    }
    return {pass, d};
}

// Norms on the complement grid are shared between the two variants.
struct SweepData {
    std::vector<double> ks, norms;
};

const SweepData& ball_sweep() {
    static const SweepData data = [] {
        SweepData s;
        for (int i = 0; i <= 152; ++i) s.ks.push_back(2.0 + 0.25 * i);
        for (const auto& e : ball_catalog().entries)
            if (std::fabs(e.k.imag()) <= 1e-4 && e.k.real() >= 2.0 && e.k.real() <= 40.0)
                s.ks.push_back(e.k.real());
        std::sort(s.ks.begin(), s.ks.end());
        s.norms.resize(s.ks.size());
        const ScattererSpec pen = ScattererSpec::penetrable(1.0, 0.5, 1.0);
        for (std::size_t i = 0; i < s.ks.size(); ++i)
            s.norms[i] = resolvent_norm(pen, Complex(s.ks[i], 0.0)).norm;
        return s;
    }();
    return data;
}

Verdict c8_exclusion() {
    const ResonanceCatalog& cat = ball_catalog();
    const auto spikes = near_realest(3, 40.0);
    const SweepData& sw = ball_sweep();
    bool pass = true;
    std::string d;
    for (const auto variant : {ExclusionVariant::Dyadic, ExclusionVariant::Refined}) {
        ExclusionParams p;
        p.variant = variant;
        if (variant == ExclusionVariant::Refined) {
            p.p = 3.0 - 1.0 / 3.0;
            p.rho = 1.0;
        }
        const double pred = exponent_prediction(p).exponent;
        bool budget = true, contained = true;
        for (const double delta : {0.1, 0.5, 1.0}) {
            p.delta = delta;
            const ExclusionSet J = build_exclusion_set(cat, p, cat.k_max);
            budget = budget && J.measure + J.tail_bound <= delta;
            for (const auto& s : spikes) contained = contained && contains(J, s.k.real());
        }
        p.delta = 0.5;
        const ExclusionSet J = build_exclusion_set(cat, p, cat.k_max);
        const EnvelopeFit fit = fit_envelope(sw.ks, sw.norms, &J);
        bool pred_ok = true;
        if (variant == ExclusionVariant::Refined)
            pred_ok = std::fabs(pred - (6.0 + 1.0 / 6.0 + p.eps)) < 1e-12;
        const bool ok = budget && contained && fit.within(pred) && pred_ok;
        pass = pass && ok;
        d += fmt("%s%s: budget %s, spikes in J %s, slope %.3f <= %.4f (%d samples, %d masked)",
                 d.empty() ? "" : "; ", to_string(variant).c_str(), budget ? "ok" : "EXCEEDED",
                 contained ? "yes" : "no", fit.slope, pred, fit.used, fit.masked);
    }
    return {pass, d};
}

Verdict c9_box() {
    int violations = 0, samples = 0;
    for (const double h : {0.3, 0.1, 0.03}) {
        const BoxImageReport r = box_image_contains(h, 0.7, 1.1, 10000, 9);
        violations += r.violations;
        samples += r.samples;
    }
    return {violations == 0, fmt("%d violations over %d mapped points", violations, samples)};
}

Verdict c10_layers() {
    const Curve circle = Curve::circle(1.0, 512);
    const BoundaryOperatorMatrix S = assemble(circle, 5.0, 0.0, LayerTag::S);
    const Complex mode0 = S.m.row(0).sum();
    const Complex exact = Complex(0.0, kPi / 2.0) * ::j0(5.0) * Complex(::j0(5.0), ::y0(5.0));
    const double s_err = std::abs(mode0 - exact);

    double eq = 0.0;
    for (const auto& [curve, k] :
         {std::pair{Curve::circle(1.0, 1024), 5.0}, std::pair{Curve::two_circles(1.0, 1.0, 640), 7.5}}) {
        const double a = inv_norm(assemble(curve, k, k, LayerTag::A)).value;
        const double ap = inv_norm(assemble(curve, k, k, LayerTag::Aprime)).value;
        eq = std::max(eq, std::fabs(a - ap) / std::max(a, ap));
    }

    std::vector<double> ks;
    for (int i = 0; i <= 50; ++i) ks.push_back(2.0 + 0.2 * i);
    const auto recs = spike_sweep(Curve::two_circles(1.0, 1.0, 4), ks);
    std::vector<double> spikes, peaks;
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (recs[i].spike) spikes.push_back(recs[i].k);
        if (i > 0 && i + 1 < recs.size() && recs[i].inv_norm_A > recs[i - 1].inv_norm_A &&
            recs[i].inv_norm_A > recs[i + 1].inv_norm_A) {
            peaks.push_back(recs[i].k);
            std::vector<double> local;
            for (const auto& r : recs)
                if (r.k != recs[i].k && std::fabs(r.k - recs[i].k) <= 1.0)
                    local.push_back(r.inv_norm_A);
            std::sort(local.begin(), local.end());
            const double med = local.size() % 2 ? local[local.size() / 2]
                                                : 0.5 * (local[local.size() / 2 - 1] +
                                                         local[local.size() / 2]);
            best_ratio = std::max(best_ratio, recs[i].inv_norm_A / med);
        }
    }
    auto spacing = [](const std::vector<double>& v) {
        return v.size() >= 2 ? (v.back() - v.front()) / double(v.size() - 1) : 0.0;
    };
    const double sp = spacing(spikes);
    const bool spikes_ok = spikes.size() >= 3 && std::fabs(sp - kPi) <= 0.2 * kPi;
    std::string peak_list;
    for (const double p : peaks) peak_list += fmt("%s%.1f", peak_list.empty() ? "" : " ", p);
    return {s_err <= 1e-6 && eq <= 0.01 && spikes_ok,
            fmt("S mode-0 error %.1e; max |A^-1| vs |A'^-1| rel diff %.1e; two circles (gap 1): "
                "%zu spikes >= 10x local median (spacing %.3f vs pi); local maxima at %s "
                "(spacing %.3f), largest peak/median %.2f",
                s_err, eq, spikes.size(), sp, peak_list.c_str(), spacing(peaks), best_ratio)};
}

Verdict c11_certificates() {
    CertifyOptions o;
    o.k_max = 40.0;
    o.top_n = 10;
    const CertifyResult r = certify(ball_catalog(), o);
    bool consistent = !r.certificates.empty();
    double best = 0.0, worst_ratio = 0.0;
    for (const auto& c : r.certificates) {
        consistent = consistent && c.consistent;
        best = std::max(best, c.lower_bound);
        worst_ratio = std::max(worst_ratio, c.lower_bound / c.direct_norm);
    }
    return {consistent && best >= 1e2,
            fmt("%zu certificates, max lower bound %.3e, max bound/direct norm %.2e", r.certificates.size(),
                best, worst_ratio)};
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict c12_determinism() {
    const fs::path root = fs::temp_directory_path() / "trapwave_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path cfg = root / "config.json";
    {
        std::ofstream out(cfg);
        out << R"({"scatterer": {"kind": "penetrable", "radius": 1, "contrast": 0.5, "alpha": 1},
  "k_range": {"lo": 2, "hi": 12, "step": 0.1},
  "layer": {"curve": "circle", "radius": 1, "k_range": {"lo": 2, "hi": 6, "step": 1}},
  "certify": {"top_n": 3}, "seed": 7})";
    }
    const char* commands[] = {"resonances", "exclusion", "sweep", "layer-sweep", "certify"};
    int files = 0;
    std::string diff;
    for (const char* threads : {"1", "3"}) {
        ::setenv("TRAPPED_WAVE_THREADS", threads, 1);
        for (const char* c : commands) {
            const int rc = run_command(c, cfg, root / (std::string("run_") + threads));
            if (rc != 0) diff += fmt(" %s exited %d;", c, rc);
        }
    }
    ::unsetenv("TRAPPED_WAVE_THREADS");
    for (const auto& e : fs::directory_iterator(root / "run_1")) {
        ++files;
        if (read_all(e.path()) != read_all(root / "run_3" / e.path().filename()))
            diff += " " + e.path().filename().string() + " differs;";
    }
    return {diff.empty() && files >= 8,
            fmt("%d output files identical across runs with 1 and 3 threads%s", files, diff.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const bool strict = argc > 1 && std::string(argv[1]) == "--strict";
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"C1 special-function Wronskians", c1_wronskians},
        {"C2 Airy zeros", c2_airy},
        {"C3 nontrapping slope", c3_nontrapping},
        {"C4 upper-half-plane bound", c4_upper_half_plane},
        {"C5 resonance finder oracle", c5_finder},
        {"C6 whispering-gallery asymptotics", c6_asymptotics},
        {"C7 spike phenomenon", c7_spikes},
        {"C8 exclusion set", c8_exclusion},
        {"C9 box image containment", c9_box},
        {"C10 layer operators", c10_layers},
        {"C11 quasimode certificates", c11_certificates},
        {"C12 determinism", c12_determinism},
    };
    std::ofstream report("acceptance_report.txt");
    int failed = 0, crashed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string line;
        try {
            const Verdict v = fn();
            failed += !v.pass;
            line = (v.pass ? "PASS " : "FAIL ") + name + ": " + v.detail;
        } catch (const std::exception& e) {
            ++crashed;
            line = "FAIL " + name + ": exception: " + e.what();
        }
        line += fmt(" [%.1f s]", seconds_since(t0));
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
        report << line << "\n";
    }
    const std::string summary = fmt("%d/%zu criteria pass", int(criteria.size()) - failed - crashed,
                                    criteria.size());
    std::printf("%s\n", summary.c_str());
    report << summary << "\n";
    if (crashed) return 1;
    return strict && failed ? 2 : 0;
}
