#pragma once

#include <limits>
#include <string>
#include <vector>

#include "trapwave/json.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/resonance_finder.hpp"
#include "trapwave/scaling_and_bounds.hpp"

namespace trapwave {

struct QuasimodeCertificate {
    double k = 0.0;
    int ell = 0;
    /// The catalog resonance the quasimode was built from.
    Complex source;
    /// ||(P - k^2) u|| for ||u|| = 1.
    double residual_norm = 0.0;
    double lower_bound = 0.0;
    /// log(lower_bound) / log(k), i.e. -log(residual) / log(k).
    double order_s = 0.0;
    bool capped = false;
    double fd_mismatch_flat = 0.0;
    /// Cut-off radius the bound refers to; the quasimode cut-off is 1 on r <= a
    /// and 0 from (a + r_chi) / 2.
    double r_chi = 0.0;
    /// Resolvent norm at the same k and r_chi; NaN when not computed.
    double direct_norm = std::numeric_limits<double>::quiet_NaN();
    /// lower_bound <= direct_norm * (1 + tolerance).
    bool consistent = true;
};

struct CertifyOptions {
    int top_n = 10;
    /// Only entries with Re k <= k_max are eligible.
    double k_max = std::numeric_limits<double>::infinity();
    bool with_direct_norm = true;
    double tolerance = 0.05;
    /// Cut-off radii tried per resonance, in units of a, when quasimode.r_chi
    /// is 0. The largest bound wins. A wider ramp lowers the residual until it
    /// reaches past the turning point.
    std::vector<double> r_chi_factors = {2.0, 2.5, 3.0, 4.0, 6.0};
    QuasimodeOptions quasimode;
    ResolventOptions resolvent;
};

struct CertifyResult {
    /// Sorted by lower bound, largest first.
    std::vector<QuasimodeCertificate> certificates;
    std::string note;
};

/// Certificates for the top_n eligible entries with the smallest |Im k|.
CertifyResult certify(const ResonanceCatalog& catalog, const CertifyOptions& opts = {});

/// `radius` is the scatterer radius a, where the cut-off starts to fall.
Json certificates_to_json(const CertifyResult& result, double radius);

struct SpikeOptions {
    /// Background samples cover [k - half_window, k + half_window].
    double half_window = 0.5;
    int background_points = 20;
    /// Offsets from the linearized pole at which the profile is sampled are
    /// +-10^e for e in [e_min, e_max] with step e_step, plus 0.
    double e_min = -40.0;
    double e_max = -3.0;
    double e_step = 0.02;
    ResolventOptions resolvent;
};

struct SpikeReport {
    Complex resonance;
    int ell = 0;
    double k_ref = 0.0;
    double peak_norm = 0.0;
    /// Median of direct norms on the background grid (the sample at k_ref excluded).
    double median_norm = 0.0;
    double ratio = 0.0;
    /// Full width at half maximum of the sampled profile, in k.
    double width = 0.0;
    /// Half maximum reached on both sides inside the sampled offset range.
    bool width_resolved = false;
};

/// Resolvent-norm spike at a near-real resonance: peak and half-maximum width
/// from near_pole_norms, background median from direct evaluations.
SpikeReport spike_report(const ScattererSpec& spec, const Resonance& res,
                         const SpikeOptions& opts = {});

}  // namespace trapwave
