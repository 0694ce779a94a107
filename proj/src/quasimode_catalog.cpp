#include "trapwave/quasimode_catalog.hpp"

#include <algorithm>
#include <cmath>

#include "trapwave/errors.hpp"

namespace trapwave {

CertifyResult certify(const ResonanceCatalog& catalog, const CertifyOptions& opts) {
    CertifyResult out;
    const double a = catalog.spec.radius;
    std::vector<double> radii;
    if (opts.quasimode.r_chi > 0.0)
        radii.push_back(opts.quasimode.r_chi);
    else
        for (const double f : opts.r_chi_factors) radii.push_back(f * a);
    if (radii.empty()) throw std::invalid_argument("no cut-off radius to try");

    std::vector<Resonance> pool;
    for (const auto& e : catalog.entries)
        if (e.k.real() <= opts.k_max && std::fabs(e.k.imag()) <= opts.quasimode.max_abs_im)
            pool.push_back(e);
    if (pool.empty()) {
        out.note = "no near-real resonances in the catalog";
        return out;
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Resonance& x, const Resonance& y) {
        return std::fabs(x.k.imag()) < std::fabs(y.k.imag());
    });
    if (static_cast<int>(pool.size()) > opts.top_n) pool.resize(std::max(0, opts.top_n));

    for (const auto& res : pool) {
        QuasimodeBound b;
        double r_chi = 0.0;
        for (const double r : radii) {
            QuasimodeOptions q = opts.quasimode;
            q.r_chi = r;
            QuasimodeBound t = quasimode_lower_bound(catalog.spec, res, q);
            if (r_chi == 0.0 || t.lower_bound > b.lower_bound) {
                b = t;
                r_chi = r;
            }
        }
        QuasimodeCertificate c;
        c.k = b.k;
        c.ell = b.ell;
        c.source = res.k;
        c.residual_norm = b.u_norm > 0.0 ? b.residual_norm / b.u_norm : 0.0;
        c.lower_bound = b.lower_bound;
        c.order_s = c.k > 1.0 && c.lower_bound > 0.0 ? std::log(c.lower_bound) / std::log(c.k)
                                                     : 0.0;
        c.capped = b.capped;
        c.fd_mismatch_flat = b.fd_mismatch_flat;
        c.r_chi = r_chi;
        if (opts.with_direct_norm) {
            ResolventOptions ropts = opts.resolvent;
            ropts.r_chi = r_chi;
            c.direct_norm = resolvent_norm(catalog.spec, Complex(c.k, 0.0), ropts).norm;
            c.consistent = c.lower_bound <= c.direct_norm * (1.0 + opts.tolerance);
        }
        out.certificates.push_back(c);
    }
    std::stable_sort(out.certificates.begin(), out.certificates.end(),
                     [](const QuasimodeCertificate& x, const QuasimodeCertificate& y) {
                         return x.lower_bound > y.lower_bound;
                     });
    return out;
}

Json certificates_to_json(const CertifyResult& result, double radius) {
    Json j;
    j["cutoff_profile"] = "smoothstep7";
    if (!result.note.empty()) j["note"] = result.note;
    Json list = Json::array();
    for (const auto& c : result.certificates) {
        Json e;
        e["k"] = c.k;
        e["ell"] = c.ell;
        e["source_re"] = c.source.real();
        e["source_im"] = c.source.imag();
        e["residual_norm"] = c.residual_norm;
        e["lower_bound"] = c.lower_bound;
        e["order_s"] = c.order_s;
        e["capped"] = c.capped;
        e["r_chi"] = c.r_chi;
        e["r_flat"] = radius;
        e["r_zero"] = 0.5 * (radius + c.r_chi);
        if (std::isnan(c.direct_norm))
            e["direct_norm"] = nullptr;
        else
            e["direct_norm"] = c.direct_norm;
        e["consistent"] = c.consistent;
        list.push_back(e);
    }
    j["certificates"] = list;
    return j;
}

SpikeReport spike_report(const ScattererSpec& spec, const Resonance& res,
                         const SpikeOptions& opts) {
    SpikeReport rep;
    rep.resonance = res.k;
    rep.ell = res.ell;
    rep.k_ref = res.k.real();
    if (!(rep.k_ref > 0.0)) throw std::invalid_argument("spike needs Re k > 0");

    // Locate the linearized pole first, then sample symmetrically around it.
    const DeterminantValue d =
        modal_determinants(spec, res.ell, ComplexL(rep.k_ref, 0.0L))[res.ell];
    const long double center = (-d.value / d.derivative).real();
    std::vector<long double> steps;
    const int n_steps = static_cast<int>(std::floor((opts.e_max - opts.e_min) / opts.e_step + 1e-9));
    for (int i = 0; i <= n_steps; ++i)
        steps.push_back(std::pow(10.0L, static_cast<long double>(opts.e_min + i * opts.e_step)));
    std::vector<long double> offsets;
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) offsets.push_back(center - *it);
    offsets.push_back(center);
    for (const auto s : steps) offsets.push_back(center + s);
    const NearPoleProfile prof = near_pole_norms(spec, res.ell, rep.k_ref, offsets, opts.resolvent);

    const auto peak_it = std::max_element(prof.norms.begin(), prof.norms.end());
    const std::size_t ip = static_cast<std::size_t>(peak_it - prof.norms.begin());
    rep.peak_norm = *peak_it;
    const double half = 0.5 * rep.peak_norm;
    // Crossing of the half maximum on each side, interpolated in log(offset).
    auto crossing = [&](int dir, long double& where) {
        for (long i = static_cast<long>(ip); i + dir >= 0 &&
                                             i + dir < static_cast<long>(prof.norms.size());
             i += dir) {
            const double n0 = prof.norms[i], n1 = prof.norms[i + dir];
            if (n1 < half) {
                const long double t0 = prof.offsets[i] - prof.offsets[ip];
                const long double t1 = prof.offsets[i + dir] - prof.offsets[ip];
                if (t0 == 0.0L) {
                    where = t1;
                    return true;
                }
                const long double l0 = std::log(std::fabs(t0)), l1 = std::log(std::fabs(t1));
                const long double f = (n0 - half) / (n0 - n1);
                where = std::exp(l0 + f * (l1 - l0));
                return true;
            }
        }
        return false;
    };
    long double left = 0.0L, right = 0.0L;
    const bool ok_l = crossing(-1, left), ok_r = crossing(+1, right);
    rep.width_resolved = ok_l && ok_r;
    rep.width = static_cast<double>(std::fabs(left) + std::fabs(right));

    std::vector<double> bg;
    const int n = std::max(2, opts.background_points);
    for (int i = 0; i <= n; ++i) {
        const double k = rep.k_ref - opts.half_window + 2.0 * opts.half_window * i / n;
        if (std::fabs(k - rep.k_ref) < 1e-12 * rep.k_ref) continue;
        bg.push_back(resolvent_norm(spec, Complex(k, 0.0), opts.resolvent).norm);
    }
    std::sort(bg.begin(), bg.end());
    const std::size_t m = bg.size();
    rep.median_norm = m % 2 ? bg[m / 2] : 0.5 * (bg[m / 2 - 1] + bg[m / 2]);
    rep.ratio = rep.peak_norm / rep.median_norm;
    return rep;
}

}  // namespace trapwave
