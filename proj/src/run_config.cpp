#include "trapwave/run_config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "trapwave/errors.hpp"

namespace trapwave {

namespace {

// Strict view of one JSON object: every key must be consumed or known.
class Section {
public:
    Section(const Json& j, std::string name, std::initializer_list<const char*> keys)
        : j_(j), name_(std::move(name)) {
        if (!j.is_object()) throw ConfigError(name_ + " must be a JSON object");
        std::set<std::string> known(keys.begin(), keys.end());
        for (const auto& item : j.items())
            if (!known.count(item.key()))
                throw ConfigError("unknown key " + name_ + "." + item.key());
    }

    bool has(const char* key) const { return j_.contains(key); }
    const Json& raw(const char* key) const { return j_.at(key); }

    void number(const char* key, double& dst) const {
        if (!has(key)) return;
        if (!j_[key].is_number()) throw ConfigError(path(key) + " must be a number");
        dst = j_[key].get<double>();
    }
    void integer(const char* key, int& dst) const {
        if (!has(key)) return;
        if (!j_[key].is_number_integer()) throw ConfigError(path(key) + " must be an integer");
        dst = j_[key].get<int>();
    }
    void boolean(const char* key, bool& dst) const {
        if (!has(key)) return;
        if (!j_[key].is_boolean()) throw ConfigError(path(key) + " must be true or false");
        dst = j_[key].get<bool>();
    }
    std::string string(const char* key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        if (!j_[key].is_string()) throw ConfigError(path(key) + " must be a string");
        return j_[key].get<std::string>();
    }
    std::string path(const char* key) const { return name_ + "." + key; }

private:
    const Json& j_;
    std::string name_;
};

KRange parse_range(const Json& j, const std::string& name, KRange r) {
    Section s(j, name, {"lo", "hi", "step"});
    s.number("lo", r.lo);
    s.number("hi", r.hi);
    s.number("step", r.step);
    return r;
}

void check_range(const KRange& r, const std::string& name) {
    if (!(r.lo > 0.0)) throw ConfigError(name + ".lo must be positive");
    if (!(r.hi >= r.lo)) throw ConfigError(name + ".hi must be at least lo");
    if (!(r.step > 0.0)) throw ConfigError(name + ".step must be positive");
    if ((r.hi - r.lo) / r.step > 1e6) throw ConfigError(name + " has more than 10^6 samples");
}

Json range_json(const KRange& r) { return Json{{"lo", r.lo}, {"hi", r.hi}, {"step", r.step}}; }

}  // namespace

std::vector<double> KRange::grid() const {
    std::vector<double> out;
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(lo + step * static_cast<double>(i));
    return out;
}

double RunConfig::catalog_k_max() const {
    return resonances.k_max > 0.0 ? resonances.k_max : k_range.hi;
}

void RunConfig::validate() const {
    scatterer.validate();
    exclusion.validate();
    check_range(k_range, "k_range");
    if (k_range.lo < exclusion.k0)
        throw ConfigError("k_range.lo must be at least exclusion.k0");
    check_range(layer.k_range, "layer.k_range");
    if (!(resonances.strip_depth > 0.0)) throw ConfigError("resonances.strip_depth must be positive");
    if (resonances.k_max < 0.0) throw ConfigError("resonances.k_max must be nonnegative");
    if (sweep.resolvent.r_chi != 0.0 && !(sweep.resolvent.r_chi > scatterer.radius))
        throw ConfigError("sweep.r_chi must exceed the scatterer radius");
    if (!(sweep.resolvent.points_per_wavelength > 0.0))
        throw ConfigError("sweep.points_per_wavelength must be positive");
    if (!(layer.radius > 0.0)) throw ConfigError("layer.radius must be positive");
    if (layer.curve == CurveKind::TwoCircles && !(layer.gap > 0.0))
        throw ConfigError("layer.gap must be positive");
    if (layer.sweep.points < 0 || layer.sweep.points % 2)
        throw ConfigError("layer.points must be a nonnegative even number");
    if (!(layer.sweep.spike_ratio > 1.0)) throw ConfigError("layer.spike_ratio must exceed 1");
    if (certify.top_n < 0) throw ConfigError("certify.top_n must be nonnegative");
    for (const double f : certify.r_chi_factors)
        if (!(f > 1.0)) throw ConfigError("certify.r_chi_factors must exceed 1");
}

RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    Section top(j, "config",
                {"scatterer", "k_range", "exclusion", "resonances", "sweep", "layer", "certify",
                 "seed"});
    if (!top.has("scatterer")) throw ConfigError("config.scatterer is required");
    c.scatterer = spec_from_json(top.raw("scatterer"));
    if (top.has("k_range")) c.k_range = parse_range(top.raw("k_range"), "k_range", c.k_range);
    if (top.has("exclusion")) c.exclusion = params_from_json(top.raw("exclusion"));
    if (top.has("seed")) {
        const Json& s = top.raw("seed");
        if (!s.is_number_unsigned()) throw ConfigError("config.seed must be a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }

    if (top.has("resonances")) {
        Section s(top.raw("resonances"), "resonances", {"k_max", "strip_depth", "ell_max", "catalog"});
        s.number("k_max", c.resonances.k_max);
        s.number("strip_depth", c.resonances.strip_depth);
        s.integer("ell_max", c.resonances.ell_max);
        if (s.has("catalog")) c.resonances.catalog = s.string("catalog", "");
    }

    if (top.has("sweep")) {
        Section s(top.raw("sweep"), "sweep",
                  {"r_chi", "l_max", "cells_per_radius", "points_per_wavelength", "method",
                   "include_spikes", "spike_im_max", "timing"});
        auto& r = c.sweep.resolvent;
        s.number("r_chi", r.r_chi);
        s.integer("l_max", r.l_max);
        s.integer("cells_per_radius", r.cells_per_radius);
        s.number("points_per_wavelength", r.points_per_wavelength);
        const std::string method = s.string("method", "nystrom");
        if (method == "nystrom")
            r.method = ResolventMethod::Nystrom;
        else if (method == "finite_difference")
            r.method = ResolventMethod::FiniteDifference;
        else
            throw ConfigError("sweep.method must be nystrom or finite_difference");
        s.boolean("include_spikes", c.sweep.include_spikes);
        s.number("spike_im_max", c.sweep.spike_im_max);
        s.boolean("timing", c.sweep.timing);
    }

    if (top.has("layer")) {
        Section s(top.raw("layer"), "layer",
                  {"curve", "radius", "gap", "k_range", "points", "eta_factor", "spike_ratio",
                   "median_half_width"});
        const std::string curve = s.string("curve", "circle");
        if (curve == "circle")
            c.layer.curve = CurveKind::Circle;
        else if (curve == "two_circles")
            c.layer.curve = CurveKind::TwoCircles;
        else
            throw ConfigError("layer.curve must be circle or two_circles");
        s.number("radius", c.layer.radius);
        s.number("gap", c.layer.gap);
        if (s.has("k_range"))
            c.layer.k_range = parse_range(s.raw("k_range"), "layer.k_range", c.layer.k_range);
        s.integer("points", c.layer.sweep.points);
        s.number("eta_factor", c.layer.sweep.eta_factor);
        s.number("spike_ratio", c.layer.sweep.spike_ratio);
        s.number("median_half_width", c.layer.sweep.median_half_width);
    }

    if (top.has("certify")) {
        Section s(top.raw("certify"), "certify", {"top_n", "k_max", "r_chi_factors", "tolerance"});
        s.integer("top_n", c.certify.top_n);
        s.number("k_max", c.certify.k_max);
        s.number("tolerance", c.certify.tolerance);
        if (s.has("r_chi_factors")) {
            const Json& f = s.raw("r_chi_factors");
            if (!f.is_array() || f.empty()) throw ConfigError("certify.r_chi_factors must be a non-empty array");
            c.certify.r_chi_factors.clear();
            for (const auto& v : f) {
                if (!v.is_number()) throw ConfigError("certify.r_chi_factors must hold numbers");
                c.certify.r_chi_factors.push_back(v.get<double>());
            }
        }
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    RunConfig c = run_config_from_json(j);
    c.base_dir = path.parent_path();
    return c;
}

Json run_config_to_json(const RunConfig& c) {
    Json j;
    j["scatterer"] = spec_to_json(c.scatterer);
    j["k_range"] = range_json(c.k_range);
    j["exclusion"] = params_to_json(c.exclusion);
    Json r;
    r["k_max"] = c.resonances.k_max;
    r["strip_depth"] = c.resonances.strip_depth;
    r["ell_max"] = c.resonances.ell_max;
    if (c.resonances.catalog) r["catalog"] = c.resonances.catalog->generic_string();
    j["resonances"] = r;
    Json s;
    s["r_chi"] = c.sweep.resolvent.r_chi;
    s["l_max"] = c.sweep.resolvent.l_max;
    s["cells_per_radius"] = c.sweep.resolvent.cells_per_radius;
    s["points_per_wavelength"] = c.sweep.resolvent.points_per_wavelength;
    s["method"] = c.sweep.resolvent.method == ResolventMethod::Nystrom ? "nystrom" : "finite_difference";
    s["include_spikes"] = c.sweep.include_spikes;
    s["spike_im_max"] = c.sweep.spike_im_max;
    s["timing"] = c.sweep.timing;
    j["sweep"] = s;
    Json l;
    l["curve"] = to_string(c.layer.curve);
    l["radius"] = c.layer.radius;
    if (c.layer.curve == CurveKind::TwoCircles) l["gap"] = c.layer.gap;
    l["k_range"] = range_json(c.layer.k_range);
    l["points"] = c.layer.sweep.points;
    l["eta_factor"] = c.layer.sweep.eta_factor;
    l["spike_ratio"] = c.layer.sweep.spike_ratio;
    l["median_half_width"] = c.layer.sweep.median_half_width;
    j["layer"] = l;
    Json q;
    q["top_n"] = c.certify.top_n;
    if (std::isfinite(c.certify.k_max)) q["k_max"] = c.certify.k_max;
    q["r_chi_factors"] = c.certify.r_chi_factors;
    q["tolerance"] = c.certify.tolerance;
    j["certify"] = q;
    j["seed"] = c.seed;
    return j;
}

}  // namespace trapwave
