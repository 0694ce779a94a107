#include "trapwave/exclusion_set.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trapwave/errors.hpp"

namespace trapwave {

namespace {

// Uniform partition of [lo, hi] without materializing it: edge j is
// lo + j * width for j < n and hi for j = n.
struct UniformPartition {
    double lo, hi, width;
    long long n;

    UniformPartition(double lo_, double hi_, double width_) : lo(lo_), hi(hi_), width(width_) {
        if (!(width > 0.0) || width >= hi - lo) {
            width = hi - lo;
            n = 1;
        } else {
            n = static_cast<long long>(std::ceil((hi - lo) / width));
            // Guard against a zero-length last cell from rounding.
            if (lo + static_cast<double>(n - 1) * width >= hi) --n;
        }
    }

    double edge(long long j) const {
        return j >= n ? hi : lo + static_cast<double>(j) * width;
    }

    // Indices of the closed cells containing x (one, or two on a shared edge).
    void cells_containing(double x, std::vector<long long>& out) const {
        if (x < lo || x > hi) return;
        long long j = static_cast<long long>(std::floor((x - lo) / width));
        j = std::clamp(j, 0LL, n - 1);
        for (long long c = std::max(0LL, j - 1); c <= std::min(n - 1, j + 1); ++c)
            if (edge(c) <= x && x <= edge(c + 1)) out.push_back(c);
    }
};

std::vector<Interval> merge(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> out;
    for (const auto& iv : v) {
        if (!out.empty() && iv.lo <= out.back().hi)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

// Runs of consecutive flagged cells, dilated and clipped to [clip_lo, clip_hi].
template <class EdgeFn>
std::vector<Interval> runs_to_intervals(std::vector<long long> flagged, EdgeFn edge,
                                        double dilation, double clip_lo, double clip_hi,
                                        int* run_count) {
    std::sort(flagged.begin(), flagged.end());
    flagged.erase(std::unique(flagged.begin(), flagged.end()), flagged.end());
    std::vector<Interval> out;
    int runs = 0;
    for (std::size_t i = 0; i < flagged.size();) {
        std::size_t j = i;
        while (j + 1 < flagged.size() && flagged[j + 1] == flagged[j] + 1) ++j;
        ++runs;
        out.push_back({std::max(clip_lo, edge(flagged[i]) - dilation),
                       std::min(clip_hi, edge(flagged[j] + 1) + dilation)});
        i = j + 1;
    }
    if (run_count) *run_count = runs;
    return merge(std::move(out));
}

double two_pow(double e) { return std::exp2(e); }

}  // namespace

std::string to_string(ExclusionVariant v) {
    return v == ExclusionVariant::Dyadic ? "dyadic" : "refined";
}

void ExclusionParams::validate() const {
    if (!(k0 > 0.0)) throw ConfigError("k0 must be positive");
    if (!(delta > 0.0)) throw ConfigError("delta must be positive");
    if (!(eps_tilde > 0.0)) throw ConfigError("eps_tilde must be positive");
    if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
    if (n_sharp < 1) throw ConfigError("n_sharp must be a positive integer");
    if (!(c_sharp >= 0.0)) throw ConfigError("c_sharp must be nonnegative");
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
    if (variant == ExclusionVariant::Refined && !p)
        throw ConfigError("the refined variant needs the box-count exponent p");
    if (p && !(*p > 0.0)) throw ConfigError("p must be positive");
}

double window_exponent(const ExclusionParams& params) {
    if (params.variant == ExclusionVariant::Dyadic)
        return params.n_sharp + 2.0 + params.eps_tilde - params.rho;
    // Per unit interval of k^2 the flagged measure is h^-2 (rescaling) times
    // 16 C_w C# h^{m - p + rho}; m = p - rho + 4 + eps_tilde makes it
    // C lam^{-1 - eps_tilde/2}, which is summable over the unit intervals.
    return *params.p - params.rho + 4.0 + params.eps_tilde;
}

ExponentPrediction exponent_prediction(const ExclusionParams& params) {
    params.validate();
    ExponentPrediction e;
    const double n = params.n_sharp;
    if (params.variant == ExclusionVariant::Dyadic)
        e.exponent = 2.5 * n + params.eps - params.rho;
    else
        e.exponent = 1.5 * n + *params.p + params.eps - params.rho;
    e.m = window_exponent(params);
    return e;
}

std::vector<Interval> partition_interval(double lo, double hi, double width) {
    if (!(hi > lo)) throw std::invalid_argument("partition needs lo < hi");
    UniformPartition part(lo, hi, width);
    std::vector<Interval> out;
    out.reserve(static_cast<std::size_t>(part.n));
    for (long long j = 0; j < part.n; ++j) out.push_back({part.edge(j), part.edge(j + 1)});
    return out;
}

std::vector<Interval> window_partition(double E, double h, double C_w, double m) {
    if (!(E > 0.0)) throw std::invalid_argument("E must be positive");
    if (!(h > 0.0 && h <= 1.0)) throw std::invalid_argument("h must lie in (0, 1]");
    if (!(C_w > 0.0)) throw std::invalid_argument("C_w must be positive");
    return partition_interval(E / 2.0, 2.0 * E, 10.0 * C_w * std::pow(h, m));
}

std::vector<Interval> flag_and_dilate(const std::vector<Interval>& partition,
                                      const std::vector<Complex>& points, double band,
                                      double dilation) {
    if (partition.empty()) return {};
    std::vector<long long> flagged;
    for (const auto& z : points) {
        if (std::fabs(z.imag()) > band) continue;
        auto it = std::lower_bound(partition.begin(), partition.end(), z.real(),
                                   [](const Interval& iv, double x) { return iv.hi < x; });
        for (; it != partition.end() && it->lo <= z.real(); ++it)
            if (z.real() <= it->hi) flagged.push_back(it - partition.begin());
    }
    return runs_to_intervals(
        std::move(flagged),
        [&](long long j) {
            return j < static_cast<long long>(partition.size()) ? partition[j].lo
                                                                : partition.back().hi;
        },
        dilation, partition.front().lo, partition.back().hi, nullptr);
}

namespace {

struct WindowResult {
    std::vector<Interval> squared;  // in k^2
    WindowSummary summary;
};

// Points are window coordinates; `offset` maps a window coordinate x to
// k^2 = scale * (offset + x).
WindowResult flag_window(const std::vector<Complex>& points, double lo, double hi, double band,
                         double width, double dilation, double keep_lo, double keep_hi,
                         double scale, double offset) {
    WindowResult r;
    UniformPartition part(lo, hi, width);
    std::vector<long long> flagged;
    for (const auto& z : points)
        if (std::fabs(z.imag()) <= band) part.cells_containing(z.real(), flagged);
    auto runs = runs_to_intervals(
        std::move(flagged), [&](long long j) { return part.edge(j); }, dilation, lo, hi,
        &r.summary.runs);
    for (const auto& iv : runs) {
        const double a = std::max(iv.lo, keep_lo), b = std::min(iv.hi, keep_hi);
        if (a <= b) r.squared.push_back({scale * offset + scale * a, scale * offset + scale * b});
    }
    return r;
}

}  // namespace

ExclusionSet build_exclusion_set(const ResonanceCatalog& catalog, const ExclusionParams& params,
                                 double k_max) {
    params.validate();
    ExclusionSet set;
    set.params = params;
    set.k_max = k_max;
    set.m = window_exponent(params);
    const double eps_t = params.eps_tilde;
    set.k_start =
        params.variant == ExclusionVariant::Dyadic ? params.k0 : std::max(params.k0, 1.0);
    // Budget in k^2: |J| <= |J~| / (2 k_start).
    const double two_delta_k = 2.0 * params.delta * set.k_start;
    const double depth = catalog.strip_depth / catalog.spec.radius;

    // Resonances in k^2, sorted by real part.
    std::vector<Complex> k2;
    for (const auto& e : catalog.entries) k2.push_back(e.k * e.k);
    std::sort(k2.begin(), k2.end(),
              [](Complex a, Complex b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); });
    auto in_range = [&](double lo, double hi) {
        auto a = std::lower_bound(k2.begin(), k2.end(), lo,
                                  [](Complex z, double x) { return z.real() < x; });
        auto b = std::upper_bound(k2.begin(), k2.end(), hi,
                                  [](double x, Complex z) { return x < z.real(); });
        return std::vector<Complex>(a, b);
    };

    if (params.variant == ExclusionVariant::Dyadic) {
        const double E = params.k0 * params.k0;
        // Window j is covered when every k with k^2 in 2^j ((E/2, 2E) + i[-1, 1])
        // satisfies |k| <= k_max.
        std::vector<std::vector<Complex>> window_points;
        long long covered = 0;
        while (two_pow(static_cast<double>(covered)) * std::hypot(2.0 * E, 1.0) <= k_max * k_max) {
            const double s = two_pow(static_cast<double>(covered));
            std::vector<Complex> pts;
            for (const auto& z : in_range(s * E / 2.0, s * 2.0 * E)) {
                const Complex w = z / s;
                if (std::fabs(w.imag()) <= 1.0) pts.push_back(w);
            }
            window_points.push_back(std::move(pts));
            ++covered;
            if (covered > 200) break;
        }
        double c_sharp = params.c_sharp;
        if (c_sharp == 0.0) {
            for (long long j = 0; j < covered; ++j) {
                const double h = two_pow(-0.5 * static_cast<double>(j));
                c_sharp = std::max(c_sharp, static_cast<double>(window_points[j].size()) *
                                                std::pow(h, params.n_sharp - params.rho));
            }
            // Any positive constant is valid for an empty catalog.
            if (c_sharp == 0.0) c_sharp = 1.0;
        }
        set.c_sharp = c_sharp;
        const double q = 1.0 - two_pow(-eps_t / 2.0);
        set.c_w = two_delta_k * q / (16.0 * c_sharp);
        for (long long j = 0; j < covered; ++j) {
            const double s = two_pow(static_cast<double>(j));
            const double h = two_pow(-0.5 * static_cast<double>(j));
            const double hm = std::pow(h, set.m);
            WindowResult w = flag_window(window_points[j], E / 2.0, 2.0 * E, 1.0,
                                         10.0 * set.c_w * hm, 3.0 * set.c_w * hm, E, 2.0 * E,
                                         s, 0.0);
            w.summary.index = j;
            w.summary.h = h;
            w.summary.count = static_cast<int>(window_points[j].size());
            w.summary.band_depth = std::fabs(std::sqrt(Complex(s * E / 2.0, -s)).imag());
            if (w.summary.band_depth > depth) ++set.shallow_windows;
            set.windows.push_back(w.summary);
            for (const auto& iv : w.squared) set.squared.push_back(iv);
        }
        // Windows j >= covered: 16 C# C_w 2^{-j eps/2} each in k^2, over 2 k0 in k.
        set.tail_bound = 16.0 * set.c_sharp * set.c_w *
                         two_pow(-static_cast<double>(covered) * eps_t / 2.0) / q /
                         (2.0 * set.k_start);
    } else {
        const double p = *params.p;
        const double lam0 = set.k_start * set.k_start;
        const double decay = 1.0 + eps_t / 2.0;
        auto series_tail = [&](double lam) {
            // Upper bound for sum_{i >= 0} (lam + i)^-decay.
            return std::pow(lam, -decay) + std::pow(lam, 1.0 - decay) / (decay - 1.0);
        };
        std::vector<std::vector<Complex>> window_points;
        long long covered = 0;
        for (;; ++covered) {
            const double lam = lam0 + static_cast<double>(covered);
            // Covered when |k^2| <= k_max^2 on the whole box lam (1 + [0, h^2] + i[-h, h]).
            if (std::hypot(lam + 1.0, std::sqrt(lam)) > k_max * k_max) break;
            // Window coordinate u = k^2 / lam - 1 in [0, h^2], band |Im| <= h.
            const double h = 1.0 / std::sqrt(lam);
            std::vector<Complex> pts;
            for (const auto& z : in_range(lam, lam + 1.0)) {
                const Complex u((z.real() - lam) / lam, z.imag() / lam);
                if (std::fabs(u.imag()) <= h) pts.push_back(u);
            }
            window_points.push_back(std::move(pts));
        }
        double c_sharp = params.c_sharp;
        if (c_sharp == 0.0) {
            for (long long i = 0; i < covered; ++i) {
                const double h = 1.0 / std::sqrt(lam0 + static_cast<double>(i));
                c_sharp = std::max(c_sharp, static_cast<double>(window_points[i].size()) *
                                                std::pow(h, p - params.rho));
            }
            if (c_sharp == 0.0) c_sharp = 1.0;
        }
        set.c_sharp = c_sharp;
        const double S = series_tail(lam0);
        set.c_w = two_delta_k / (16.0 * c_sharp * S);
        set.strip_L = params.n_sharp + params.eps;
        set.strip_constant = std::min(0.5, set.c_w);
        for (long long i = 0; i < covered; ++i) {
            const double lam = lam0 + static_cast<double>(i);
            const double h = 1.0 / std::sqrt(lam);
            const double hm = std::pow(h, set.m);
            const double strip = set.strip_constant * std::pow(h, set.m + 1.5 * set.strip_L);
            if (!(strip <= 0.5 * std::pow(h, 1.0 + set.strip_L))) set.strip_condition = false;
            WindowResult w = flag_window(window_points[i], 0.0, h * h, h, 10.0 * set.c_w * hm,
                                         3.0 * set.c_w * hm, 0.0, h * h, lam, 1.0);
            for (auto& iv : w.squared) {
                iv.lo = std::clamp(iv.lo, lam, lam + 1.0);
                iv.hi = std::clamp(iv.hi, lam, lam + 1.0);
            }
            w.summary.index = i;
            w.summary.h = h;
            w.summary.count = static_cast<int>(window_points[i].size());
            w.summary.band_depth = std::fabs(std::sqrt(Complex(lam, -lam * h)).imag());
            if (w.summary.band_depth > depth) ++set.shallow_windows;
            set.windows.push_back(w.summary);
            for (const auto& iv : w.squared) set.squared.push_back(iv);
        }
        set.tail_bound = 16.0 * set.c_w * set.c_sharp *
                         series_tail(lam0 + static_cast<double>(covered)) / (2.0 * set.k_start);
    }

    set.squared = merge(std::move(set.squared));
    for (const auto& iv : set.squared) {
        Interval k{std::sqrt(iv.lo), std::sqrt(iv.hi)};
        set.intervals.push_back(k);
    }
    set.intervals = merge(std::move(set.intervals));
    set.measure = measure(set);
    return set;
}

double coverage_k_max(const ExclusionParams& params, double k_hi) {
    params.validate();
    if (params.variant == ExclusionVariant::Dyadic) {
        const double E = params.k0 * params.k0;
        const double j = std::max(0.0, std::floor(std::log2(k_hi * k_hi / E)));
        return std::sqrt(two_pow(j) * std::hypot(2.0 * E, 1.0)) * (1.0 + 1e-12);
    }
    const double lam0 = std::max(params.k0, 1.0) * std::max(params.k0, 1.0);
    const double lam = lam0 + std::max(0.0, std::floor(k_hi * k_hi - lam0));
    return std::sqrt(std::hypot(lam + 1.0, std::sqrt(lam))) * (1.0 + 1e-12);
}

bool contains(const ExclusionSet& set, double k) {
    auto it = std::lower_bound(set.intervals.begin(), set.intervals.end(), k,
                               [](const Interval& iv, double x) { return iv.hi < x; });
    return it != set.intervals.end() && it->lo <= k;
}

bool contains_squared(const ExclusionSet& set, double k2) {
    auto it = std::lower_bound(set.squared.begin(), set.squared.end(), k2,
                               [](const Interval& iv, double x) { return iv.hi < x; });
    return it != set.squared.end() && it->lo <= k2;
}

double measure(const ExclusionSet& set) {
    double m = 0.0;
    for (const auto& iv : set.intervals) m += iv.length();
    return m;
}

Json params_to_json(const ExclusionParams& p) {
    Json j;
    j["variant"] = to_string(p.variant);
    j["k0"] = p.k0;
    j["delta"] = p.delta;
    j["eps_tilde"] = p.eps_tilde;
    j["eps"] = p.eps;
    j["n_sharp"] = p.n_sharp;
    j["c_sharp"] = p.c_sharp;
    j["rho"] = p.rho;
    if (p.p) j["p"] = *p.p;
    return j;
}

ExclusionParams params_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("exclusion parameters must be an object");
    static const char* known[] = {"variant", "k0",     "delta", "eps_tilde", "eps",
                                  "n_sharp", "c_sharp", "rho",  "p"};
    for (const auto& [key, value] : j.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char* k) { return key == k; }) == std::end(known))
            throw ConfigError("unknown exclusion parameter '" + key + "'");
    }
    ExclusionParams p;
    try {
        if (j.contains("variant")) {
            const auto v = j["variant"].get<std::string>();
            if (v == "dyadic")
                p.variant = ExclusionVariant::Dyadic;
            else if (v == "refined")
                p.variant = ExclusionVariant::Refined;
            else
                throw ConfigError("unknown exclusion variant '" + v + "'");
        }
        p.k0 = j.value("k0", p.k0);
        p.delta = j.value("delta", p.delta);
        p.eps_tilde = j.value("eps_tilde", p.eps_tilde);
        p.eps = j.value("eps", p.eps);
        p.n_sharp = j.value("n_sharp", p.n_sharp);
        p.c_sharp = j.value("c_sharp", p.c_sharp);
        p.rho = j.value("rho", p.rho);
        if (j.contains("p")) p.p = j["p"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad exclusion parameter: ") + e.what());
    }
    p.validate();
    return p;
}

Json exclusion_to_json(const ExclusionSet& set) {
    Json j;
    Json ivs = Json::array();
    for (const auto& iv : set.intervals) ivs.push_back(Json::array({iv.lo, iv.hi}));
    j["intervals"] = ivs;
    j["measure"] = set.measure;
    j["tail_bound"] = set.tail_bound;
    Json p = params_to_json(set.params);
    p["c_sharp_used"] = set.c_sharp;
    p["c_w"] = set.c_w;
    p["m"] = set.m;
    p["k_max"] = set.k_max;
    p["k_start"] = set.k_start;
    p["windows"] = set.windows.size();
    p["shallow_windows"] = set.shallow_windows;
    if (set.params.variant == ExclusionVariant::Refined) {
        p["strip_constant"] = set.strip_constant;
        p["strip_L"] = set.strip_L;
        p["strip_condition"] = set.strip_condition;
    }
    j["params"] = p;
    return j;
}

ExclusionSet exclusion_from_json(const Json& j) {
    ExclusionSet set;
    try {
        for (const auto& iv : j.at("intervals")) {
            Interval k{iv.at(0).get<double>(), iv.at(1).get<double>()};
            if (!(k.lo <= k.hi)) throw ConfigError("interval with lo > hi");
            if (!set.intervals.empty() && k.lo <= set.intervals.back().hi)
                throw ConfigError("intervals must be sorted and disjoint");
            set.intervals.push_back(k);
            set.squared.push_back({k.lo * k.lo, k.hi * k.hi});
        }
        set.tail_bound = j.at("tail_bound").get<double>();
        Json p = j.at("params");
        auto take = [&](const char* key, double& dst) {
            if (p.contains(key)) {
                dst = p[key].get<double>();
                p.erase(key);
            }
        };
        take("c_sharp_used", set.c_sharp);
        take("c_w", set.c_w);
        take("m", set.m);
        take("k_max", set.k_max);
        take("k_start", set.k_start);
        take("strip_constant", set.strip_constant);
        take("strip_L", set.strip_L);
        if (p.contains("strip_condition")) {
            set.strip_condition = p["strip_condition"].get<bool>();
            p.erase("strip_condition");
        }
        if (p.contains("shallow_windows")) {
            set.shallow_windows = p["shallow_windows"].get<int>();
            p.erase("shallow_windows");
        }
        p.erase("windows");
        set.params = params_from_json(p);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed exclusion set: ") + e.what());
    }
    set.measure = measure(set);
    return set;
}

}  // namespace trapwave
