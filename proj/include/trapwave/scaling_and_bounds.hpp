#pragma once

#include <cstdint>
#include <vector>

#include "trapwave/exclusion_set.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/resonance_finder.hpp"

namespace trapwave {

/// h^-1 z^{1/2} (principal branch).
Complex box_image(double h, Complex z);

struct BoxImageReport {
    bool contained = true;
    int violations = 0;
    int samples = 0;
    /// Largest Re image relative to h^-1, i.e. max (h Re w - 1) / h^2; must stay <= c1.
    double max_re_excess = 0.0;
    double max_abs_im = 0.0;
};

/// Maps the four corners and `samples` seeded uniform points of
/// [1, 1 + h^2] + i[-h, h] through box_image and counts those outside
/// [h^-1, h^-1 (1 + c1 h^2)] + i[-c2, c2].
BoxImageReport box_image_contains(double h, double c1, double c2, int samples,
                                  std::uint64_t seed = 1);

struct EnvelopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Largest |log norm - (intercept + slope log k)| over the samples used.
    double max_residual = 0.0;
    int used = 0;
    int masked = 0;

    bool within(double predicted_exponent) const { return slope <= predicted_exponent; }
};

/// Least-squares line through (log k, log norm) over samples outside `mask`.
/// Throws InsufficientDataError with fewer than `min_samples` unmasked samples
/// or when they span less than a factor of 2 in k.
EnvelopeFit fit_envelope(const std::vector<double>& k, const std::vector<double>& norm,
                         const ExclusionSet* mask = nullptr, int min_samples = 50);

/// Radial cut-off: 1 on r <= r0, 0 on r >= r1, degree-7 smoothstep between
/// (three continuous derivatives).
struct SmoothCutoff {
    double r0 = 1.0;
    double r1 = 1.5;
    /// Value and first two r-derivatives.
    void eval(double r, double& f, double& df, double& d2f) const;
};

struct QuasimodeOptions {
    /// Cut-off radius of the resolvent; 0 selects 2a. The quasimode cut-off
    /// falls from 1 at r = a to 0 at (a + r_chi) / 2.
    double r_chi = 0.0;
    /// Gauss-Legendre panels per length a (8 nodes each).
    int panels_per_radius = 64;
    /// Lower bounds above this are reported as capped.
    double cap = 1e14;
    /// Precondition on the source resonance.
    double max_abs_im = 1e-3;
    /// Points per length a of the finite-difference cross-check grid.
    int fd_points_per_radius = 2000;
};

struct QuasimodeBound {
    double k = 0.0;
    int ell = 0;
    double u_norm = 0.0;
    double residual_norm = 0.0;
    /// ||u|| / ||(P - k^2) u||, which bounds ||chi R(k) chi|| from below.
    double lower_bound = 0.0;
    bool capped = false;
    /// |Im k| exceeds the precondition; lower_bound is 0.
    bool vacuous = false;
    /// Max |sixth-order difference residual - analytic residual| / max |u|, on
    /// r <= a (where the analytic residual vanishes) and on the cut-off ramp.
    double fd_mismatch_flat = 0.0;
    double fd_mismatch_ramp = 0.0;
    SmoothCutoff cutoff;
};

/// Applies the cap: ||u|| / ||f||, capped (and flagged) when ||f|| is at round-off level.
QuasimodeBound bound_from_norms(double u_norm, double residual_norm, double cap = 1e14);

/// Quasimode u = cutoff(r) * phi_l(r) at k = Re k_res, where phi_l is the
/// regular modal solution (j_l(k r / c) inside, continued through the
/// interface conditions). Inside the ball u solves the equation exactly, so
/// the residual lives on the cut-off ramp only.
QuasimodeBound quasimode_lower_bound(const ScattererSpec& spec, const Resonance& res,
                                     const QuasimodeOptions& opts = {});

}  // namespace trapwave
