#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "trapwave/exclusion_set.hpp"
#include "trapwave/json.hpp"
#include "trapwave/layer_operators.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/quasimode_catalog.hpp"
#include "trapwave/scatterer_models.hpp"

namespace trapwave {

struct KRange {
    double lo = 2.0;
    double hi = 64.0;
    double step = 0.5;

    /// lo, lo + step, ... up to hi (inclusive within step * 1e-9); built from
    /// integer multiples so the grid does not drift.
    std::vector<double> grid() const;
};

struct ResonanceSettings {
    /// 0 takes the top of k_range.
    double k_max = 0.0;
    double strip_depth = 3.0;
    int ell_max = -1;
    /// JSON-lines catalog to load instead of searching (relative to the config file).
    std::optional<std::filesystem::path> catalog;
};

struct SweepSettings {
    ResolventOptions resolvent;
    /// Also sample Re k of every catalog resonance with |Im k| <= spike_im_max.
    bool include_spikes = true;
    double spike_im_max = 1e-4;
    /// Record per-sample wall time; off by default so outputs stay byte-identical.
    bool timing = false;
};

struct LayerSettings {
    CurveKind curve = CurveKind::Circle;
    double radius = 1.0;
    double gap = 1.0;
    KRange k_range{2.0, 30.0, 0.5};
    LayerSweepOptions sweep;
};

struct RunConfig {
    ScattererSpec scatterer;
    KRange k_range;
    ExclusionParams exclusion;
    ResonanceSettings resonances;
    SweepSettings sweep;
    LayerSettings layer;
    CertifyOptions certify;
    std::uint64_t seed = 1;
    /// Directory of the config file; relative paths resolve against it.
    std::filesystem::path base_dir;

    /// Throws ConfigError.
    void validate() const;
    double catalog_k_max() const;
};

/// Strict parse: unknown keys and wrong types are ConfigErrors.
RunConfig run_config_from_json(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);
Json run_config_to_json(const RunConfig& c);

}  // namespace trapwave
