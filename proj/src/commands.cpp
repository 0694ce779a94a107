#include "trapwave/commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "trapwave/errors.hpp"
#include "trapwave/parallel.hpp"
#include "trapwave/scaling_and_bounds.hpp"

namespace trapwave {

namespace fs = std::filesystem;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

void prepare_out(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out))
        throw ConfigError("cannot create output directory " + out.string());
}

ResonanceCatalog obtain_catalog(const RunConfig& c, double k_max) {
    const auto& r = c.resonances;
    if (r.catalog) {
        const fs::path p = r.catalog->is_absolute() ? *r.catalog : c.base_dir / *r.catalog;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw ConfigError("cannot read catalog " + p.string());
        std::stringstream ss;
        ss << in.rdbuf();
        ResonanceCatalog cat;
        cat.spec = c.scatterer;
        cat.k_max = k_max;
        cat.strip_depth = r.strip_depth;
        cat.ell_max = r.ell_max;
        try {
            cat.entries = catalog_from_jsonl(ss.str(), c.scatterer.dimension);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("malformed catalog " + p.string() + ": " + e.what());
        }
        return cat;
    }
    return find_resonances(c.scatterer, k_max, r.strip_depth, r.ell_max);
}

// An explicit resonances.k_max wins; otherwise the catalog reaches far enough
// for every exclusion window meeting the sweep range to be covered.
double exclusion_catalog_k_max(const RunConfig& c) {
    if (c.resonances.k_max > 0.0) return c.resonances.k_max;
    return std::max(c.k_range.hi, coverage_k_max(c.exclusion, c.k_range.hi));
}

Json entry_json(const Resonance& e) {
    return Json{{"re", e.k.real()}, {"im", e.k.imag()}, {"ell", e.ell}};
}

// |Im k| of the lowest resonance of each mode should shrink as l grows.
Json im_trend(const ResonanceCatalog& cat) {
    std::map<int, Resonance> lowest;
    for (const auto& e : cat.entries) {
        auto it = lowest.find(e.ell);
        if (it == lowest.end() || e.k.real() < it->second.k.real()) lowest[e.ell] = e;
    }
    int violations = 0, pairs = 0;
    double prev = -1.0;
    for (const auto& [ell, e] : lowest) {
        const double im = std::fabs(e.k.imag());
        if (prev >= 0.0) {
            ++pairs;
            if (im > prev) ++violations;
        }
        prev = im;
    }
    Json j;
    j["family"] = "lowest resonance per mode";
    j["modes"] = lowest.size();
    j["increasing_pairs"] = violations;
    j["monotone"] = pairs > 0 && violations == 0;
    return j;
}

}  // namespace

int cmd_resonances(const RunConfig& config, const fs::path& out) {
    prepare_out(out);
    const ResonanceCatalog cat = obtain_catalog(config, config.catalog_k_max());
    write_file(out / "catalog.jsonl", catalog_to_jsonl(cat));

    Json s;
    s["scatterer"] = spec_to_json(cat.spec);
    s["k_max"] = cat.k_max;
    s["strip_depth"] = cat.strip_depth;
    s["ell_max"] = cat.ell_max;
    s["count"] = cat.entries.size();
    long long weighted = 0;
    for (const auto& e : cat.entries) weighted += e.multiplicity;
    s["weighted_count"] = weighted;
    if (cat.entries.empty()) {
        s["nearest_to_axis"] = nullptr;
    } else {
        const auto it = std::min_element(cat.entries.begin(), cat.entries.end(),
                                         [](const Resonance& a, const Resonance& b) {
                                             return std::fabs(a.k.imag()) < std::fabs(b.k.imag());
                                         });
        s["nearest_to_axis"] = entry_json(*it);
    }
    Json cl = Json::array();
    for (const auto& c : cat.clusters)
        cl.push_back(Json{{"re", c.center.real()}, {"im", c.center.imag()}, {"ell", c.ell},
                          {"count", c.count}});
    s["clusters"] = cl;
    s["im_trend"] = im_trend(cat);
    write_json(out / "summary.json", s);
    return kExitOk;
}

int cmd_exclusion(const RunConfig& config, const fs::path& out) {
    prepare_out(out);
    const ResonanceCatalog cat = obtain_catalog(config, exclusion_catalog_k_max(config));
    const ExclusionSet set = build_exclusion_set(cat, config.exclusion, cat.k_max);
    write_json(out / "exclusion.json", exclusion_to_json(set));
    return kExitOk;
}

int cmd_sweep(const RunConfig& config, const fs::path& out) {
    prepare_out(out);
    const ResonanceCatalog cat = obtain_catalog(config, exclusion_catalog_k_max(config));
    const ExclusionSet set = build_exclusion_set(cat, config.exclusion, cat.k_max);

    std::vector<double> ks = config.k_range.grid();
    int spike_samples = 0;
    if (config.sweep.include_spikes) {
        for (const auto& e : cat.entries) {
            const double re = e.k.real();
            if (std::fabs(e.k.imag()) <= config.sweep.spike_im_max && re >= config.k_range.lo &&
                re <= config.k_range.hi) {
                ks.push_back(re);
                ++spike_samples;
            }
        }
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    }

    struct Row {
        double norm = 0.0;
        int mode = 0;
        double ms = 0.0;
    };
    std::vector<Row> rows(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const ResolventEstimate e = resolvent_norm(config.scatterer, Complex(ks[i], 0.0),
                                                   config.sweep.resolvent);
        rows[i].norm = e.norm;
        rows[i].mode = e.argmax_mode;
        if (config.sweep.timing)
            rows[i].ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
    });

    std::string csv = "k,norm,argmax_mode,excluded,wall_ms\n";
    std::vector<double> norms(ks.size());
    int excluded = 0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const bool ex = contains(set, ks[i]);
        excluded += ex;
        norms[i] = rows[i].norm;
        csv += format_number(ks[i]) + "," + format_number(rows[i].norm) + "," +
               std::to_string(rows[i].mode) + "," + (ex ? "true" : "false") + "," +
               (config.sweep.timing ? format_number(std::round(rows[i].ms * 1000.0) / 1000.0)
                                    : std::string("0")) +
               "\n";
    }
    write_file(out / "sweep.csv", csv);
    write_json(out / "exclusion.json", exclusion_to_json(set));

    const ExponentPrediction pred = exponent_prediction(config.exclusion);
    Json rep;
    rep["samples"] = ks.size();
    rep["spike_samples"] = spike_samples;
    rep["excluded_samples"] = excluded;
    rep["measure"] = set.measure;
    rep["tail_bound"] = set.tail_bound;
    rep["delta"] = config.exclusion.delta;
    rep["measure_within_budget"] = set.measure + set.tail_bound <= config.exclusion.delta;
    rep["variant"] = to_string(config.exclusion.variant);
    rep["predicted_exponent"] = pred.exponent;
    int code = kExitOk;
    try {
        const EnvelopeFit full = fit_envelope(ks, norms, nullptr, 2);
        rep["slope_all"] = full.slope;
        const EnvelopeFit fit = fit_envelope(ks, norms, &set);
        rep["slope"] = fit.slope;
        rep["intercept"] = fit.intercept;
        rep["max_residual"] = fit.max_residual;
        rep["fit_samples"] = fit.used;
        rep["pass"] = fit.within(pred.exponent);
        if (!fit.within(pred.exponent)) code = kExitEnvelope;
    } catch (const InsufficientDataError& e) {
        rep["slope"] = nullptr;
        rep["pass"] = nullptr;
        rep["note"] = e.what();
        code = kExitConfig;
    }
    write_json(out / "sweep_report.json", rep);
    if (code == kExitConfig) throw ConfigError(rep["note"].get<std::string>());
    return code;
}

int cmd_layer_sweep(const RunConfig& config, const fs::path& out) {
    prepare_out(out);
    const auto& L = config.layer;
    const Curve shape = L.curve == CurveKind::Circle ? Curve::circle(L.radius, 2)
                                                     : Curve::two_circles(L.radius, L.gap, 4);
    const std::vector<double> ks = L.k_range.grid();
    const auto recs = spike_sweep(shape, ks, L.sweep);

    std::string csv = "k,inv_norm_A,inv_norm_Aprime,spike_flag\n";
    double worst = 0.0;
    std::vector<double> spikes;
    for (const auto& r : recs) {
        csv += format_number(r.k) + "," + format_number(r.inv_norm_A) + "," +
               format_number(r.inv_norm_Aprime) + "," + (r.spike ? "1" : "0") + "\n";
        worst = std::max(worst, std::fabs(r.inv_norm_A - r.inv_norm_Aprime) /
                                    std::max(r.inv_norm_A, r.inv_norm_Aprime));
        if (r.spike) spikes.push_back(r.k);
    }
    write_file(out / "layer_sweep.csv", csv);

    Json rep;
    rep["curve"] = to_string(L.curve);
    rep["radius"] = L.radius;
    if (L.curve == CurveKind::TwoCircles) rep["gap"] = L.gap;
    rep["points_per_component"] =
        L.sweep.points ? L.sweep.points : required_points(shape, ks.back()) / shape.components;
    rep["max_relative_difference"] = worst;
    rep["spikes"] = spikes;
    if (spikes.size() >= 2)
        rep["mean_spacing"] = (spikes.back() - spikes.front()) / double(spikes.size() - 1);
    else
        rep["mean_spacing"] = nullptr;
    // Local maxima regardless of height, for comparison with the spike list.
    Json peaks = Json::array();
    for (std::size_t i = 1; i + 1 < recs.size(); ++i)
        if (recs[i].inv_norm_A > recs[i - 1].inv_norm_A && recs[i].inv_norm_A > recs[i + 1].inv_norm_A)
            peaks.push_back(recs[i].k);
    rep["local_maxima"] = peaks;
    if (L.curve == CurveKind::TwoCircles) rep["predicted_spacing"] = std::acos(-1.0) / L.gap;
    write_json(out / "layer_report.json", rep);
    return kExitOk;
}

int cmd_certify(const RunConfig& config, const fs::path& out) {
    prepare_out(out);
    const ResonanceCatalog cat = obtain_catalog(config, config.catalog_k_max());
    CertifyOptions opts = config.certify;
    opts.resolvent = config.sweep.resolvent;
    const CertifyResult res = certify(cat, opts);
    write_json(out / "certificates.json", certificates_to_json(res, cat.spec.radius));
    return kExitOk;
}

int run_command(const std::string& command, const fs::path& config_path, const fs::path& out) {
    try {
        const RunConfig config = load_run_config(config_path);
        if (command == "resonances") return cmd_resonances(config, out);
        if (command == "sweep") return cmd_sweep(config, out);
        if (command == "layer-sweep") return cmd_layer_sweep(config, out);
        if (command == "exclusion") return cmd_exclusion(config, out);
        if (command == "certify") return cmd_certify(config, out);
        std::cerr << "unknown command: " << command << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace trapwave
