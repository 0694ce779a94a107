#include "trapwave/scaling_and_bounds.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "trapwave/errors.hpp"

namespace trapwave {

Complex box_image(double h, Complex z) { return std::sqrt(z) / h; }

BoxImageReport box_image_contains(double h, double c1, double c2, int samples,
                                  std::uint64_t seed) {
    if (!(h > 0.0 && h <= 0.3)) throw std::invalid_argument("h must lie in (0, 0.3]");
    if (!(c1 > 0.625) || !(c2 > 1.0)) throw std::invalid_argument("need c1 > 5/8 and c2 > 1");
    if (samples < 0) throw std::invalid_argument("sample count must be nonnegative");
    BoxImageReport rep;
    const double lo = 1.0 / h, hi = (1.0 + c1 * h * h) / h;
    // Round-off allowance on the edges, which the exact image touches.
    const double tol = 1e-12 * hi;
    auto check = [&](Complex z) {
        const Complex w = box_image(h, z);
        ++rep.samples;
        rep.max_re_excess = std::max(rep.max_re_excess, (h * w.real() - 1.0) / (h * h));
        rep.max_abs_im = std::max(rep.max_abs_im, std::fabs(w.imag()));
        if (w.real() < lo - tol || w.real() > hi + tol || std::fabs(w.imag()) > c2) {
            ++rep.violations;
            rep.contained = false;
        }
    };
    const double h2 = h * h;
    for (double re : {1.0, 1.0 + h2})
        for (double im : {-h, h}) check(Complex(re, im));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ure(1.0, 1.0 + h2), uim(-h, h);
    for (int i = 0; i < samples; ++i) {
        const double re = ure(rng);
        check(Complex(re, uim(rng)));
    }
    return rep;
}

EnvelopeFit fit_envelope(const std::vector<double>& k, const std::vector<double>& norm,
                         const ExclusionSet* mask, int min_samples) {
    if (k.size() != norm.size()) throw std::invalid_argument("k and norm sizes differ");
    EnvelopeFit fit;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (mask && contains(*mask, k[i])) {
            ++fit.masked;
            continue;
        }
        if (!(k[i] > 0.0) || !(norm[i] > 0.0))
            throw std::invalid_argument("envelope fit needs positive k and norm");
        x.push_back(std::log(k[i]));
        y.push_back(std::log(norm[i]));
    }
    fit.used = static_cast<int>(x.size());
    if (fit.used < std::max(min_samples, 2))
        throw InsufficientDataError("envelope fit has " + std::to_string(fit.used) +
                                    " unmasked samples, needs " + std::to_string(min_samples));
    const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
    if (*xmax - *xmin < std::log(2.0) * (1.0 - 1e-12))
        throw InsufficientDataError("envelope fit samples span less than an octave");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_residual =
            std::max(fit.max_residual, std::fabs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

void SmoothCutoff::eval(double r, double& f, double& df, double& d2f) const {
    if (r <= r0) {
        f = 1.0;
        df = d2f = 0.0;
        return;
    }
    if (r >= r1) {
        f = df = d2f = 0.0;
        return;
    }
    const double w = r1 - r0, s = (r - r0) / w;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    // S(s) = 35 s^4 - 84 s^5 + 70 s^6 - 20 s^7 rises from 0 to 1.
    const double S = s4 * (35.0 - 84.0 * s + 70.0 * s2 - 20.0 * s3);
    const double dS = s3 * (140.0 - 420.0 * s + 420.0 * s2 - 140.0 * s3);
    const double d2S = s2 * (420.0 - 1680.0 * s + 2100.0 * s2 - 840.0 * s3);
    f = 1.0 - S;
    df = -dS / w;
    d2f = -d2S / (w * w);
}

QuasimodeBound bound_from_norms(double u_norm, double residual_norm, double cap) {
    QuasimodeBound b;
    b.u_norm = u_norm;
    b.residual_norm = residual_norm;
    if (residual_norm <= u_norm / cap) {
        b.lower_bound = cap;
        b.capped = true;
    } else {
        b.lower_bound = u_norm / residual_norm;
    }
    return b;
}

namespace {

constexpr std::array<double, 8> kGaussX = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussW = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct Profile {
    const ScattererSpec& spec;
    int ell;
    double k;
    SmoothCutoff cut;

    // u, u' and the analytic residual (P - k^2) u at r.
    void eval(double r, Complex& u, Complex& du, Complex& f) const {
        const ModalSolutions s = modal_solutions(spec, ell, ComplexL(k, 0.0L), r);
        const Complex phi(static_cast<double>(s.phi1.real()), static_cast<double>(s.phi1.imag()));
        const Complex dphi(static_cast<double>(s.dphi1.real()),
                           static_cast<double>(s.dphi1.imag()));
        double c, dc, d2c;
        cut.eval(r, c, dc, d2c);
        u = c * phi;
        du = c * dphi + dc * phi;
        // Outside the scatterer P = -Lap; the cut-off only varies there.
        const double n1 = spec.dimension - 1;
        f = -(d2c * phi + 2.0 * dc * dphi + n1 / r * dc * phi);
    }

    double weight(double r) const {
        const double w = spec.is_penetrable() && r < spec.radius
                             ? 1.0 / (spec.contrast * spec.contrast * spec.alpha)
                             : 1.0;
        return w * std::pow(r, spec.dimension - 1);
    }

    // Coefficients of (P - k^2) u = -s (u'' + (n-1)/r u' - L/r^2 u) - k^2 u
    // with s = c^2 inside a penetrable ball and 1 elsewhere.
    double speed2(double r) const {
        return spec.is_penetrable() && r < spec.radius ? spec.contrast * spec.contrast : 1.0;
    }
};

}  // namespace

QuasimodeBound quasimode_lower_bound(const ScattererSpec& spec, const Resonance& res,
                                     const QuasimodeOptions& opts) {
    spec.validate();
    const double a = spec.radius;
    const double r_chi = opts.r_chi > 0.0 ? opts.r_chi : 2.0 * a;
    if (!(r_chi > a)) throw std::invalid_argument("cut-off radius must exceed the radius");
    const double k = res.k.real();
    if (!(k > 0.0)) throw std::invalid_argument("quasimode needs Re k > 0");
    Profile prof{spec, res.ell, k, SmoothCutoff{a, 0.5 * (a + r_chi)}};

    QuasimodeBound out;
    if (std::fabs(res.k.imag()) > opts.max_abs_im) {
        out.k = k;
        out.ell = res.ell;
        out.vacuous = true;
        out.cutoff = prof.cut;
        return out;
    }

    // Gauss-Legendre on [r_start, a] (flat part) and [a, r1] (ramp).
    const double r_start = spec.is_impenetrable() ? a : 0.0;
    double u2 = 0.0, f2 = 0.0;
    auto integrate = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        const int panels =
            std::max(1, static_cast<int>(std::ceil(opts.panels_per_radius * (hi - lo) / a)));
        const double w = (hi - lo) / panels;
        for (int p = 0; p < panels; ++p) {
            for (int g = 0; g < 8; ++g) {
                const double r = lo + w * (p + 0.5 * (kGaussX[g] + 1.0));
                Complex u, du, f;
                prof.eval(r, u, du, f);
                const double wt = 0.5 * w * kGaussW[g] * prof.weight(r);
                u2 += wt * std::norm(u);
                f2 += wt * std::norm(f);
            }
        }
    };
    integrate(r_start, a);
    integrate(a, prof.cut.r1);

    out = bound_from_norms(std::sqrt(u2), std::sqrt(f2), opts.cap);
    out.k = k;
    out.ell = res.ell;
    out.cutoff = prof.cut;

    // Sixth-order finite differences of u against the analytic residual.
    const double d = a / opts.fd_points_per_radius;
    const double L = spec.dimension == 3 ? double(res.ell) * (res.ell + 1)
                                         : double(res.ell) * res.ell;
    const double kmax2 = spec.is_penetrable() && spec.contrast < 1.0
                             ? k * k / (spec.contrast * spec.contrast)
                             : k * k;
    auto mismatch = [&](double lo, double hi) {
        const long n = static_cast<long>(std::floor((hi - lo) / d));
        if (n < 7) return 0.0;
        std::vector<Complex> u(n + 1), f(n + 1);
        std::vector<double> r(n + 1);
        for (long i = 0; i <= n; ++i) {
            r[i] = lo + d * static_cast<double>(i);
            Complex du;
            prof.eval(r[i], u[i], du, f[i]);
        }
        double worst = 0.0, umax = 0.0;
        for (const auto& v : u) umax = std::max(umax, std::abs(v));
        for (long i = 3; i + 3 <= n; ++i) {
            const Complex d1 = (-u[i - 3] + 9.0 * u[i - 2] - 45.0 * u[i - 1] + 45.0 * u[i + 1] -
                                9.0 * u[i + 2] + u[i + 3]) /
                               (60.0 * d);
            const Complex d2 = (2.0 * u[i - 3] - 27.0 * u[i - 2] + 270.0 * u[i - 1] - 490.0 * u[i] +
                                270.0 * u[i + 1] - 27.0 * u[i + 2] + 2.0 * u[i + 3]) /
                               (180.0 * d * d);
            const double ri = r[i];
            const Complex pu =
                -prof.speed2(ri) * (d2 + (spec.dimension - 1) / ri * d1 - L / (ri * ri) * u[i]) -
                k * k * u[i];
            worst = std::max(worst, std::abs(pu - f[i]));
        }
        return umax > 0.0 ? worst / (kmax2 * umax) : 0.0;
    };
    // Stay clear of r = 0 and of the interface, where u'' jumps.
    if (r_start < a) out.fd_mismatch_flat = mismatch(r_start + 0.05 * a, a - 4.0 * d);
    out.fd_mismatch_ramp = mismatch(a + 4.0 * d, prof.cut.r1);
    return out;
}

}  // namespace trapwave
