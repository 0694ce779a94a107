#pragma once

#include <string>
#include <vector>

#include "trapwave/json.hpp"
#include "trapwave/scatterer_models.hpp"

namespace trapwave {

/// Axis-aligned rectangle [re_lo, re_hi] x [im_lo, im_hi] in the k-plane.
struct SearchBox {
    double re_lo, re_hi, im_lo, im_hi;

    bool contains(Complex k, double margin = 0.0) const {
        return k.real() >= re_lo - margin && k.real() <= re_hi + margin &&
               k.imag() >= im_lo - margin && k.imag() <= im_hi + margin;
    }
};

struct Resonance {
    Complex k;
    int ell = 0;
    int multiplicity = 1;
    /// |D_l(k)| relative to the largest |D_l| on the enclosing box boundary.
    double residual = 0.0;
    int newton_iterations = 0;
};

/// A box at the size floor still holding more than one zero.
struct ResonanceCluster {
    Complex center;
    int ell = 0;
    int count = 0;
};

struct ResonanceCatalog {
    ScattererSpec spec;
    double strip_depth = 3.0;
    double k_max = 0.0;
    double re_min = 0.0;
    int ell_max = 0;
    /// Sorted by (Re k, l, Im k).
    std::vector<Resonance> entries;
    std::vector<ResonanceCluster> clusters;
};

struct FinderOptions {
    /// Left edge of the search region; negative selects 0.1 / a.
    double re_min = -1.0;
    /// Column width of the initial split; 0 selects 0.5 / a.
    double column_width = 0.0;
    /// Top edge of the search region above the real axis, in units of 1/a.
    double top = 0.1;
};

/// Winding number of D_l around the box, i.e. the number of resonances of
/// mode l inside. Throws ContourError if the count cannot be stabilized.
int count_in_box(const ScattererSpec& spec, int ell, const SearchBox& box);

/// All resonances with Re k in [re_min, k_max], Im(k a) >= -strip_depth and
/// l <= ell_max. ell_max < 0 selects ceil(k_max a / min(c, 1)) + 10.
ResonanceCatalog find_resonances(const ScattererSpec& spec, double k_max,
                                 double strip_depth = 3.0, int ell_max = -1,
                                 const FinderOptions& opts = {});

/// Resonances of one mode inside an explicit box (no Im < 0 filtering).
std::vector<Resonance> find_resonances_in_box(const ScattererSpec& spec, int ell,
                                              const SearchBox& box);

/// Newton refinement of a zero of D_l from an initial guess.
struct NewtonResult {
    Complex k;
    int iterations = 0;
    bool converged = false;
};
NewtonResult refine_resonance(const ScattererSpec& spec, int ell, Complex guess,
                              int max_iter = 60);

struct AsymptoticResidual {
    double nu = 0.0;
    int index = 1;
    /// c (nu + a_i (nu/2)^{1/3}), the predicted real part of k.
    double predicted_re_k = 0.0;
    bool matched = false;
    Complex matched_k;
    /// Re(k)/c - nu - a_i (nu/2)^{1/3}.
    double residual = 0.0;
};

struct AsymptoticsReport {
    std::vector<AsymptoticResidual> rows;
    double max_abs_residual = 0.0;
    /// Least-squares slope of the residual against nu over matched rows.
    double slope = 0.0;
    int unmatched = 0;
};

/// Whispering-gallery check for a penetrable catalog over l in [ell_lo, ell_hi]
/// and Airy indices 1..max_index (radius a is scaled out). Unmatched rows are
/// predictions with no same-mode catalog entry within 3 units of nu.
AsymptoticsReport check_asymptotics(const ResonanceCatalog& catalog, int ell_lo = 10,
                                    int ell_hi = 40, int max_index = 1);

struct CountingValue {
    long long count = 0;
    /// r exceeds the catalog's k_max, so the count may be incomplete.
    bool truncated = false;
};

/// Multiplicity-weighted number of catalog entries with |k| <= r.
CountingValue counting_function(const ResonanceCatalog& catalog, double r);

Json resonance_to_json(const Resonance& r);
/// One JSON object per line: {re, im, ell, multiplicity, residual}.
std::string catalog_to_jsonl(const ResonanceCatalog& catalog);
std::vector<Resonance> catalog_from_jsonl(const std::string& text, int dimension);

}  // namespace trapwave
