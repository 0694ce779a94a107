#pragma once

// Frequency exclusion sets: real frequencies near which resonances may make
// the cut-off resolvent large, assembled window by window with an explicit
// measure budget.
//
// Two constructions are provided.
//
// Dyadic: k^2 in [k0^2, inf) is split into [2^j E, 2^{j+1} E), E = k0^2, and
// each piece is rescaled by h^2 = 2^-j into the window (E/2, 2E). The window
// is cut into intervals of width 10 C_w h^m; intervals whose band
// I + i[-1, 1] meets a rescaled resonance are flagged, merged into runs and
// dilated by 3 C_w h^m on both sides.
//
// Refined: the unit intervals [lam, lam + 1] of k^2 are rescaled by h^2 = 1/lam
// into (1, 1 + h^2) and flagged against the band +-h.
//
// Measure accounting: a flagged interval contributes at most its own width
// plus the two dilation margins, 16 C_w h^m in window coordinates. C_w is
// chosen so that the sum over all windows, including those beyond the
// catalog, is at most delta in k.

#include <optional>
#include <string>
#include <vector>

#include "trapwave/json.hpp"
#include "trapwave/resonance_finder.hpp"

namespace trapwave {

enum class ExclusionVariant { Dyadic, Refined };

std::string to_string(ExclusionVariant v);

struct ExclusionParams {
    double k0 = 1.0;
    double delta = 0.5;
    /// Decay margin of the window series.
    double eps_tilde = 0.5;
    /// Slack added to the predicted exponent.
    double eps = 0.1;
    int n_sharp = 3;
    /// Resonance-density constant; 0 fits it from the catalog.
    double c_sharp = 0.0;
    ExclusionVariant variant = ExclusionVariant::Dyadic;
    /// Box-count exponent; required by the refined variant.
    std::optional<double> p;
    /// Multiplicity exponent: distinct locations scale like the count times k^-rho.
    double rho = 0.0;

    /// Throws ConfigError on inconsistent fields.
    void validate() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

struct ExponentPrediction {
    double exponent = 0.0;
    /// Window exponent m used by the construction.
    double m = 0.0;
};

/// Dyadic: 5 n#/2 + eps - rho. Refined: 3 n#/2 + p + eps - rho.
ExponentPrediction exponent_prediction(const ExclusionParams& params);

/// Window exponent m of the construction (see the .cpp for the refined case).
double window_exponent(const ExclusionParams& params);

/// Contiguous closed intervals covering [lo, hi], all of width `width` except
/// the last. A width at least hi - lo gives the single interval [lo, hi].
std::vector<Interval> partition_interval(double lo, double hi, double width);

/// Partition of (E/2, 2E) into intervals of width 10 C_w h^m.
std::vector<Interval> window_partition(double E, double h, double C_w, double m);

/// Flags the partition intervals I with (I + i[-band, band]) containing one of
/// `points` (closed intervals, so a point on a shared edge flags both
/// neighbours), merges adjacent flagged intervals into runs, dilates each run
/// by `dilation` on both sides and clips to the partition's span. Output is
/// sorted and disjoint.
std::vector<Interval> flag_and_dilate(const std::vector<Interval>& partition,
                                      const std::vector<Complex>& points, double band,
                                      double dilation);

struct WindowSummary {
    /// Dyadic index j or unit-interval offset.
    long long index = 0;
    double h = 0.0;
    /// Distinct resonance locations inside the window's band.
    int count = 0;
    /// Number of flagged runs.
    int runs = 0;
    /// Largest |Im k| the window's band reaches; compare with the catalog depth.
    double band_depth = 0.0;
};

struct ExclusionSet {
    /// Sorted, disjoint, closed intervals in k.
    std::vector<Interval> intervals;
    /// The same set in k^2.
    std::vector<Interval> squared;
    double measure = 0.0;
    /// Bound on the measure contributed by windows the catalog does not cover.
    double tail_bound = 0.0;
    ExclusionParams params;
    double c_sharp = 0.0;
    double c_w = 0.0;
    double m = 0.0;
    double k_max = 0.0;
    /// Lower end of the set's support (k0, or max(k0, 1) for the refined variant).
    double k_start = 0.0;
    std::vector<WindowSummary> windows;
    /// Windows whose band reaches deeper than the catalog strip.
    int shallow_windows = 0;
    /// Refined variant only: constant c of the maximum-principle strip width
    /// c h^{m + 3L/2}, L = n# + eps, and whether c h^{m+3L/2} <= h^{1+L}/2 held
    /// in every window.
    double strip_constant = 0.0;
    double strip_L = 0.0;
    bool strip_condition = true;
};

/// Builds the set from a catalog covering |k| <= k_max. Windows are used only
/// when fully covered; the rest enter tail_bound.
ExclusionSet build_exclusion_set(const ResonanceCatalog& catalog, const ExclusionParams& params,
                                 double k_max);

/// Catalog reach needed for every window meeting [k_start, k_hi] to be covered.
double coverage_k_max(const ExclusionParams& params, double k_hi);

/// Closed-interval membership.
bool contains(const ExclusionSet& set, double k);
bool contains_squared(const ExclusionSet& set, double k2);
double measure(const ExclusionSet& set);

Json params_to_json(const ExclusionParams& p);
ExclusionParams params_from_json(const Json& j);
/// {intervals, measure, tail_bound, params}.
Json exclusion_to_json(const ExclusionSet& set);
ExclusionSet exclusion_from_json(const Json& j);

}  // namespace trapwave
