#include "trapwave/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "trapwave/errors.hpp"

namespace trapwave {

namespace {

using Real = long double;

constexpr Real kPi = std::numbers::pi_v<long double>;
constexpr Real kEulerGamma = std::numbers::egamma_v<long double>;
const ComplexL kI(0.0L, 1.0L);

// Backward recurrences are rescaled well before the long double limit.
constexpr Real kRescaleAbove = 1e2000L;
constexpr Real kRescaleBy = 1e-2000L;

Real cabs(const ComplexL& z) { return std::hypot(z.real(), z.imag()); }

// Starting order for Miller's algorithm: walk the large-order ratio estimate
// |f_{n+1}/f_n| ~ |z| / (nu + sqrt(nu^2 - |z|^2)) until the accumulated decay
// from the largest needed order passes exp(-55).
int miller_start(int max_order, Real az, Real shift) {
    int n = std::max(max_order, static_cast<int>(std::ceil(az)));
    Real log_decay = 0.0L;
    const Real target = -55.0L;
    while (log_decay > target) {
        const Real nu = n + shift;
        const Real disc = nu * nu - az * az;
        const Real ratio = az / (nu + std::sqrt(std::max(disc, Real(0))) + 1.0L);
        log_decay += std::log(std::max(ratio, Real(1e-300)));
        ++n;
    }
    return n + 8;
}

ComplexL sph_j0(const ComplexL& z) { return std::sin(z) / z; }
ComplexL sph_j1(const ComplexL& z) { return std::sin(z) / (z * z) - std::cos(z) / z; }

// j_0..j_{L+1} at z != 0 by Miller's algorithm, normalized on whichever of the
// closed-form j_0, j_1 is larger.
std::vector<ComplexL> spherical_j(int top, const ComplexL& z) {
    std::vector<ComplexL> out(top + 1);
    const Real az = cabs(z);
    const int start = miller_start(top, az, 1.5L);
    ComplexL next(0.0L, 0.0L);
    ComplexL cur(1e-30L, 0.0L);
    for (int n = start; n >= 1; --n) {
        if (n <= top) out[n] = cur;
        ComplexL prev = Real(2 * n + 1) / z * cur - next;
        next = cur;
        cur = prev;
        if (cabs(cur) > kRescaleAbove) {
            cur *= kRescaleBy;
            next *= kRescaleBy;
            for (int m = n; m <= top && m <= start; ++m) out[m] *= kRescaleBy;
        }
    }
    out[0] = cur;
    const ComplexL t0 = sph_j0(z);
    const ComplexL t1 = sph_j1(z);
    const ComplexL scale = (cabs(t0) >= cabs(t1) || top < 1) ? t0 / out[0] : t1 / out[1];
    for (auto& v : out) v *= scale;
    return out;
}

// J_0..J_{L+1} at z != 0 by Miller's algorithm normalized with
// exp(i s z) = J_0 + 2 sum (i s)^n J_n, s = +1 for Im z <= 0 and -1 otherwise
// (keeps the normalizer bounded by the size of the J_n themselves). The
// Neumann sums needed for Y_0 and Y_1 are accumulated on the same pass.
struct CylindricalMiller {
    std::vector<ComplexL> j;
    ComplexL y0_sum;  // sum_{k>=1} (-1)^k J_{2k} / k
    ComplexL y1_sum;  // sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k
};

CylindricalMiller cylindrical_j(int top, const ComplexL& z) {
    CylindricalMiller res;
    res.j.assign(top + 1, ComplexL(0));
    const Real az = cabs(z);
    int start = miller_start(std::max(top, 2), az, 0.0L);
    if (start % 2 == 1) ++start;
    const Real s = (z.imag() <= 0.0L) ? 1.0L : -1.0L;
    const ComplexL is(0.0L, s);

    // f_{start+1} = 0, f_start = tiny; walk down.
    ComplexL f_next(0.0L);   // f_{n+1}
    ComplexL f_cur(1e-30L);  // f_n
    ComplexL f_next2(0.0L);  // f_{n+2}, for the y1 sum
    ComplexL norm_sum(0.0L);
    ComplexL y0(0.0L);
    ComplexL y1(0.0L);
    // (i s)^n for n = start, tracked downward via multiplication by 1/(i s) = -i s.
    const ComplexL powers[4] = {ComplexL(1.0L), is, ComplexL(-1.0L), -is};
    ComplexL phase = powers[start % 4];
    const ComplexL inv_is = ComplexL(0.0L, -s);
    for (int n = start; n >= 1; --n) {
        if (n <= top) res.j[n] = f_cur;
        norm_sum += 2.0L * phase * f_cur;
        if (n % 2 == 0) {
            const int k = n / 2;
            const Real sign = (k % 2 == 0) ? 1.0L : -1.0L;
            y0 += sign * f_cur / Real(k);
        } else {
            // n = 2k - 1 pairs with f_{n+2} = J_{2k+1}.
            const int k = (n + 1) / 2;
            const Real sign = (k % 2 == 0) ? 1.0L : -1.0L;
            y1 += sign * (f_cur - f_next2) / Real(k);
        }
        ComplexL prev = Real(2 * n) / z * f_cur - f_next;
        f_next2 = f_next;
        f_next = f_cur;
        f_cur = prev;
        phase *= inv_is;
        if (cabs(f_cur) > kRescaleAbove) {
            f_cur *= kRescaleBy;
            f_next *= kRescaleBy;
            f_next2 *= kRescaleBy;
            norm_sum *= kRescaleBy;
            y0 *= kRescaleBy;
            y1 *= kRescaleBy;
            for (int m = n; m <= top; ++m) res.j[m] *= kRescaleBy;
        }
    }
    res.j[0] = f_cur;
    norm_sum += f_cur;
    const ComplexL scale = std::exp(is * z) / norm_sum;
    for (auto& v : res.j) v *= scale;
    res.y0_sum = y0 * scale;
    res.y1_sum = y1 * scale;
    return res;
}

// Large-argument expansion of H^(1)_nu, truncated at its smallest term. Used
// only for integer orders 0 and 1 high in the upper half-plane, where J + iY
// cancels.
ComplexL hankel_asymptotic(int nu, const ComplexL& z) {
    const Real mu = 4.0L * nu * nu;
    ComplexL sum(1.0L), term(1.0L);
    Real last = INFINITY;
    for (int k = 1; k < 60; ++k) {
        const Real odd = Real(2 * k - 1);
        const ComplexL next = term * kI * (mu - odd * odd) / (Real(k) * 8.0L * z);
        const Real mag = cabs(next);
        if (mag >= last || mag == 0.0L) break;
        last = mag;
        term = next;
        sum += term;
        if (mag < 1e-21L * cabs(sum)) break;
    }
    const ComplexL omega = z - Real(nu) * kPi / 2.0L - kPi / 4.0L;
    return std::sqrt(2.0L / (kPi * z)) * std::exp(kI * omega) * sum;
}

void check_finite_arg(const ComplexL& z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error("Bessel argument must be finite");
}

Complex to_double(const ComplexL& v, const char* what) {
    const Real lim = std::numeric_limits<double>::max();
    if (!(std::fabs(v.real()) <= lim && std::fabs(v.imag()) <= lim))
        throw OverflowError(std::string(what) + ": result exceeds double range");
    return Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

// Value of C_{l+1/2}(z) = sqrt(2z/pi) c_l(z) and its derivative from a
// spherical table row.
ComplexL half_order(const ComplexL& z, const ComplexL& c) {
    return std::sqrt(2.0L * z / kPi) * c;
}

ComplexL half_order_prime(const ComplexL& z, const ComplexL& c, const ComplexL& c_prime) {
    return std::sqrt(2.0L * z / kPi) * (c / (2.0L * z) + c_prime);
}

}  // namespace

Order::Order(double value) : value_(value), twice_(0) {
    if (!(value >= 0.0) || !std::isfinite(value))
        throw std::domain_error("Bessel order must be finite and non-negative");
    const double tw = 2.0 * value;
    if (tw != std::round(tw) || tw > 1e6)
        throw std::domain_error("Bessel order must be an integer or half-integer");
    twice_ = static_cast<int>(tw);
}

ComplexL BesselTable::j_prime(int n) const {
    if (family == BesselFamily::Spherical)
        return Real(n) / z * j[n] - j[n + 1];
    return n == 0 ? -j[1] : Real(n) / z * j[n] - j[n + 1];
}

ComplexL BesselTable::y_prime(int n) const { return Real(n) / z * y[n] - y[n + 1]; }

ComplexL BesselTable::h_prime(int n) const { return Real(n) / z * h[n] - h[n + 1]; }

std::vector<ComplexL> bessel_j_orders(BesselFamily family, int max_order, ComplexL z) {
    if (max_order < 0) throw std::domain_error("max_order must be non-negative");
    check_finite_arg(z);
    const int top = max_order + 1;
    if (z == ComplexL(0)) {
        std::vector<ComplexL> out(top + 1, ComplexL(0));
        out[0] = 1.0L;
        return out;
    }
    if (family == BesselFamily::Spherical) return spherical_j(top, z);
    return cylindrical_j(top, z).j;
}

BesselTable bessel_table(BesselFamily family, int max_order, ComplexL z, bool with_singular) {
    if (max_order < 0) throw std::domain_error("max_order must be non-negative");
    check_finite_arg(z);
    BesselTable t;
    t.family = family;
    t.z = z;
    t.max_order = max_order;
    const int top = max_order + 1;
    if (!with_singular) {
        t.j = bessel_j_orders(family, max_order, z);
        return t;
    }
    if (z == ComplexL(0)) throw SingularityError("Y and H are singular at z = 0");

    t.y.resize(top + 1);
    t.h.resize(top + 1);
    // In the closed lower half-plane H = J + iY loses nothing (both parts are
    // as large as H) and keeps Re H = J exact to relative precision when
    // |Y| >> |J|. Above the axis J and Y grow while H decays, so H gets its
    // own forward recurrence instead.
    const bool lower = z.imag() <= 0.0L;
    if (family == BesselFamily::Spherical) {
        t.j = spherical_j(top, z);
        const ComplexL c = std::cos(z), s = std::sin(z), e = std::exp(kI * z);
        t.y[0] = -c / z;
        t.h[0] = -kI * e / z;
        if (top >= 1) {
            t.y[1] = -c / (z * z) - s / z;
            t.h[1] = -e * (z + kI) / (z * z);
        }
        for (int n = 1; n < top; ++n) {
            const ComplexL f = Real(2 * n + 1) / z;
            t.y[n + 1] = f * t.y[n] - t.y[n - 1];
            if (!lower) t.h[n + 1] = f * t.h[n] - t.h[n - 1];
        }
    } else {
        CylindricalMiller m = cylindrical_j(top, z);
        t.j = std::move(m.j);
        const ComplexL lg = std::log(z / 2.0L) + kEulerGamma;
        const ComplexL j0 = t.j[0];
        const ComplexL j1 = t.j[1];
        t.y[0] = (2.0L / kPi) * lg * j0 - (4.0L / kPi) * m.y0_sum;
        t.y[1] = -(2.0L / kPi) * (j0 / z - lg * j1) + (2.0L / kPi) * m.y1_sum;
        for (int n = 1; n < top; ++n)
            t.y[n + 1] = Real(2 * n) / z * t.y[n] - t.y[n - 1];
        if (!lower) {
            if (cabs(z) >= 14.0L && z.imag() > 2.0L) {
                t.h[0] = hankel_asymptotic(0, z);
                t.h[1] = hankel_asymptotic(1, z);
            } else {
                t.h[0] = j0 + kI * t.y[0];
                t.h[1] = j1 + kI * t.y[1];
            }
            for (int n = 1; n < top; ++n)
                t.h[n + 1] = Real(2 * n) / z * t.h[n] - t.h[n - 1];
        }
    }
    if (lower)
        for (int n = 0; n <= top; ++n) t.h[n] = t.j[n] + kI * t.y[n];
    return t;
}

namespace {

enum class Kind { J, Y, H, JPrime, HPrime };

Complex evaluate(Order nu, Complex zd, Kind kind, const char* name) {
    const ComplexL z(zd.real(), zd.imag());
    check_finite_arg(z);
    const int n = nu.base();
    const bool singular = kind == Kind::Y || kind == Kind::H || kind == Kind::HPrime;
    if (z == ComplexL(0)) {
        if (singular) throw SingularityError(std::string(name) + " has a pole at z = 0");
        if (kind == Kind::J) return nu.value() == 0.0 ? Complex(1.0) : Complex(0.0);
        // J'_nu(0): 1/2 for nu = 1, 0 for nu > 1 or nu = 0; singular for nu = 1/2.
        if (nu.value() == 1.0) return Complex(0.5);
        if (nu.value() == 0.5) throw SingularityError("J'_{1/2} is singular at z = 0");
        return Complex(0.0);
    }
    if (nu.is_integer()) {
        BesselTable t = bessel_table(BesselFamily::Cylindrical, n, z, singular);
        switch (kind) {
            case Kind::J: return to_double(t.j[n], name);
            case Kind::Y: return to_double(t.y[n], name);
            case Kind::H: return to_double(t.h[n], name);
            case Kind::JPrime: return to_double(t.j_prime(n), name);
            case Kind::HPrime: return to_double(t.h_prime(n), name);
        }
    }
    BesselTable t = bessel_table(BesselFamily::Spherical, n, z, singular);
    switch (kind) {
        case Kind::J: return to_double(half_order(z, t.j[n]), name);
        case Kind::Y: return to_double(half_order(z, t.y[n]), name);
        case Kind::H: return to_double(half_order(z, t.h[n]), name);
        case Kind::JPrime: return to_double(half_order_prime(z, t.j[n], t.j_prime(n)), name);
        case Kind::HPrime: return to_double(half_order_prime(z, t.h[n], t.h_prime(n)), name);
    }
    return {};
}

Complex evaluate_spherical(int ell, Complex zd, Kind kind, const char* name) {
    if (ell < 0) throw std::domain_error("spherical order must be non-negative");
    const ComplexL z(zd.real(), zd.imag());
    check_finite_arg(z);
    const bool singular = kind == Kind::Y || kind == Kind::H || kind == Kind::HPrime;
    if (z == ComplexL(0)) {
        if (singular) throw SingularityError(std::string(name) + " has a pole at z = 0");
        if (kind == Kind::J) return ell == 0 ? Complex(1.0) : Complex(0.0);
        return ell == 1 ? Complex(1.0 / 3.0) : Complex(0.0);
    }
    BesselTable t = bessel_table(BesselFamily::Spherical, ell, z, singular);
    switch (kind) {
        case Kind::J: return to_double(t.j[ell], name);
        case Kind::Y: return to_double(t.y[ell], name);
        case Kind::H: return to_double(t.h[ell], name);
        case Kind::JPrime: return to_double(t.j_prime(ell), name);
        case Kind::HPrime: return to_double(t.h_prime(ell), name);
    }
    return {};
}

}  // namespace

Complex cyl_bessel_j(Order nu, Complex z) { return evaluate(nu, z, Kind::J, "J"); }
Complex cyl_bessel_y(Order nu, Complex z) { return evaluate(nu, z, Kind::Y, "Y"); }
Complex cyl_hankel1(Order nu, Complex z) { return evaluate(nu, z, Kind::H, "H1"); }
Complex cyl_bessel_j_prime(Order nu, Complex z) { return evaluate(nu, z, Kind::JPrime, "J'"); }
Complex cyl_hankel1_prime(Order nu, Complex z) { return evaluate(nu, z, Kind::HPrime, "H1'"); }

Complex sph_bessel(int ell, Complex z) { return evaluate_spherical(ell, z, Kind::J, "j"); }
Complex sph_bessel_y(int ell, Complex z) { return evaluate_spherical(ell, z, Kind::Y, "y"); }
Complex sph_hankel1(int ell, Complex z) { return evaluate_spherical(ell, z, Kind::H, "h1"); }
Complex sph_bessel_prime(int ell, Complex z) {
    return evaluate_spherical(ell, z, Kind::JPrime, "j'");
}
Complex sph_hankel1_prime(int ell, Complex z) {
    return evaluate_spherical(ell, z, Kind::HPrime, "h1'");
}

// ---------------------------------------------------------------------------
// Airy function on the real line.

namespace {

constexpr Real kAi0 = 0.355028053887817239260063186004183176L;
constexpr Real kAip0 = -0.258819403792806798405183560189203963L;
constexpr Real kSeriesLimit = 8.0L;

void airy_series(Real x, Real& ai, Real& aip) {
    // Ai = Ai(0) f + Ai'(0) g with f = sum a_k x^{3k}, g = sum b_k x^{3k+1}.
    const Real x3 = x * x * x;
    Real a = 1.0L, b = x;
    Real f = a, g = b;
    Real fp = 0.0L, gp = 1.0L;
    for (int k = 1; k < 200; ++k) {
        a *= x3 / Real((3 * k - 1) * (3 * k));
        b *= x3 / Real((3 * k) * (3 * k + 1));
        f += a;
        g += b;
        if (x != 0.0L) {
            fp += Real(3 * k) * a / x;
            gp += Real(3 * k + 1) * b / x;
        }
        if (std::fabs(a) + std::fabs(b) < 1e-24L * (std::fabs(f) + std::fabs(g))) break;
    }
    ai = kAi0 * f + kAip0 * g;
    aip = kAi0 * fp + kAip0 * gp;
}

// Asymptotic expansion for |x| > kSeriesLimit, truncated at the smallest term.
void airy_asymptotic(Real x, Real& ai, Real& aip) {
    const Real t = std::fabs(x);
    const Real zeta = 2.0L / 3.0L * t * std::sqrt(t);
    // u_k, v_k coefficients.
    Real u[40], v[40];
    u[0] = v[0] = 1.0L;
    for (int k = 1; k < 40; ++k) {
        u[k] = u[k - 1] * Real((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
               (216.0L * k * Real(2 * k - 1));
        v[k] = -Real(6 * k + 1) / Real(6 * k - 1) * u[k];
    }
    if (x > 0) {
        Real su = 0, sv = 0, zp = 1, last = INFINITY;
        for (int k = 0; k < 40; ++k) {
            const Real term = u[k] / zp;
            if (std::fabs(term) > last) break;
            last = std::fabs(term);
            const Real sgn = (k % 2 == 0) ? 1.0L : -1.0L;
            su += sgn * term;
            sv += sgn * v[k] / zp;
            zp *= zeta;
        }
        const Real e = std::exp(-zeta) / (2.0L * std::sqrt(kPi));
        ai = e * std::pow(t, -0.25L) * su;
        aip = -e * std::pow(t, 0.25L) * sv;
        return;
    }
    Real pu = 0, qu = 0, pv = 0, qv = 0;
    Real last = INFINITY;
    Real zp = 1.0L;
    for (int k = 0; k < 40; ++k) {
        const Real term = u[k] / zp;
        if (std::fabs(term) > last) break;
        last = std::fabs(term);
        const int half = k / 2;
        const Real sgn = (half % 2 == 0) ? 1.0L : -1.0L;
        if (k % 2 == 0) {
            pu += sgn * term;
            pv += sgn * v[k] / zp;
        } else {
            qu += sgn * term;
            qv += sgn * v[k] / zp;
        }
        zp *= zeta;
    }
    const Real phase = zeta - kPi / 4.0L;
    const Real c = std::cos(phase), s = std::sin(phase);
    const Real pre = 1.0L / std::sqrt(kPi);
    ai = pre * std::pow(t, -0.25L) * (c * pu + s * qu);
    aip = pre * std::pow(t, 0.25L) * (s * pv - c * qv);
}

void airy_pair(Real x, Real& ai, Real& aip) {
    if (std::fabs(x) <= kSeriesLimit)
        airy_series(x, ai, aip);
    else
        airy_asymptotic(x, ai, aip);
}

}  // namespace

double airy_ai(double x) {
    Real ai, aip;
    airy_pair(x, ai, aip);
    return static_cast<double>(ai);
}

double airy_ai_prime(double x) {
    Real ai, aip;
    airy_pair(x, ai, aip);
    return static_cast<double>(aip);
}

std::vector<double> airy_neg_zeros(int count) {
    if (count < 1 || count > 50) throw std::domain_error("airy_neg_zeros: count must be in [1, 50]");
    std::vector<double> out;
    out.reserve(count);
    for (int k = 1; k <= count; ++k) {
        const Real t = 3.0L * kPi * (4.0L * k - 1.0L) / 8.0L;
        Real x = std::pow(t, 2.0L / 3.0L) *
                 (1.0L + 5.0L / 48.0L / (t * t) - 5.0L / 36.0L / (t * t * t * t));
        for (int it = 0; it < 50; ++it) {
            Real ai, aip;
            airy_pair(-x, ai, aip);
            const Real step = ai / aip;
            x += step;
            if (std::fabs(step) < 1e-17L * x) break;
        }
        out.push_back(static_cast<double>(x));
    }
    return out;
}

}  // namespace trapwave
