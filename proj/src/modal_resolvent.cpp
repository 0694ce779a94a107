#include "trapwave/modal_resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lanczos.hpp"
#include "trapwave/errors.hpp"
#include "trapwave/parallel.hpp"

namespace trapwave {

namespace {

using Real = long double;
const ComplexL kI(0.0L, 1.0L);
constexpr Real kPi = std::numbers::pi_v<long double>;

Real angular(int dimension, int ell) {
    return dimension == 3 ? Real(ell) * (ell + 1) : Real(ell) * ell;
}

// j y' - j' y for the family at argument z.
ComplexL family_wronskian(BesselFamily family, const ComplexL& z) {
    return family == BesselFamily::Spherical ? 1.0L / (z * z) : 2.0L / (kPi * z);
}

// Second derivative from the Bessel ODE.
ComplexL second_derivative(int dimension, int ell, const ComplexL& z, const ComplexL& f,
                           const ComplexL& fp) {
    return -Real(dimension - 1) / z * fp - (1.0L - angular(dimension, ell) / (z * z)) * f;
}

// phi1 = A f_j + B f_y outside, phi2 = P f_j + Q f_y inside (penetrable only),
// W = p (phi1 phi2' - phi1' phi2).
struct ModeCoefficients {
    ComplexL A{1.0L}, B{0.0L}, P{0.0L}, Q{0.0L}, W{0.0L};
};

struct InterfaceTables {
    BesselTable out;  // at k a
    BesselTable in;   // at k a / c (penetrable only)
};

InterfaceTables interface_tables(const ScattererSpec& spec, int l_max, ComplexL k) {
    InterfaceTables t;
    const ComplexL za = k * Real(spec.radius);
    if (spec.kind != ScattererKind::Free) t.out = bessel_table(spec.family(), l_max, za, true);
    if (spec.is_penetrable())
        t.in = bessel_table(spec.family(), l_max, za / Real(spec.contrast), true);
    return t;
}

ModeCoefficients mode_coefficients(const ScattererSpec& spec, int ell, ComplexL k,
                                   const InterfaceTables& t) {
    ModeCoefficients m;
    const ComplexL wfac = spec.dimension == 3 ? 1.0L / k : ComplexL(2.0L / kPi);
    switch (spec.kind) {
        case ScattererKind::Free:
            break;
        case ScattererKind::ImpenetrableDirichlet:
            m.A = kI * t.out.y[ell];
            m.B = -kI * t.out.j[ell];
            break;
        case ScattererKind::ImpenetrableNeumann:
            m.A = kI * t.out.y_prime(ell);
            m.B = -kI * t.out.j_prime(ell);
            break;
        case ScattererKind::Penetrable: {
            const Real c = spec.contrast, alpha = spec.alpha;
            const ComplexL kc = k / c;
            const ComplexL jin = t.in.j[ell], djin = kc * t.in.j_prime(ell);
            const ComplexL yin = t.in.y[ell], dyin = kc * t.in.y_prime(ell);
            const ComplexL jo = t.out.j[ell], djo = t.out.j_prime(ell);
            const ComplexL yo = t.out.y[ell], dyo = t.out.y_prime(ell);
            const ComplexL ho = t.out.h[ell], dho = t.out.h_prime(ell);
            const ComplexL wo = family_wronskian(spec.family(), t.out.z);
            const ComplexL flux = djin / (alpha * k);
            m.A = (jin * dyo - yo * flux) / wo;
            m.B = (jo * flux - djo * jin) / wo;
            const ComplexL win = kc * family_wronskian(spec.family(), t.in.z);
            m.P = (ho * dyin - alpha * k * dho * yin) / win;
            m.Q = (jin * alpha * k * dho - djin * ho) / win;
            break;
        }
    }
    m.W = (kI * m.A - m.B) * wfac;
    return m;
}

ModalSolutions solutions_at(const ScattererSpec& spec, int ell, ComplexL k, double r,
                            const ModeCoefficients& m, const BesselTable& t) {
    ModalSolutions s;
    if (spec.is_penetrable() && r < spec.radius) {
        const ComplexL kc = k / Real(spec.contrast);
        s.phi1 = t.j[ell];
        s.dphi1 = kc * t.j_prime(ell);
        s.phi2 = m.P * t.j[ell] + m.Q * t.y[ell];
        s.dphi2 = kc * (m.P * t.j_prime(ell) + m.Q * t.y_prime(ell));
    } else {
        s.phi1 = m.A * t.j[ell] + m.B * t.y[ell];
        s.dphi1 = k * (m.A * t.j_prime(ell) + m.B * t.y_prime(ell));
        s.phi2 = t.h[ell];
        s.dphi2 = k * t.h_prime(ell);
    }
    return s;
}

ComplexL node_argument(const ScattererSpec& spec, ComplexL k, double r) {
    if (spec.is_penetrable() && r < spec.radius) return k * Real(r) / Real(spec.contrast);
    return k * Real(r);
}

double weight(const ScattererSpec& spec, double r) {
    if (spec.is_penetrable() && r < spec.radius)
        return 1.0 / (spec.contrast * spec.contrast * spec.alpha);
    return 1.0;
}

double flux_weight(const ScattererSpec& spec, double r) {
    if (spec.is_penetrable() && r < spec.radius) return 1.0 / spec.alpha;
    return 1.0;
}

void check_frequency(Complex k) {
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || k.real() <= 0.0 || k.imag() < 0.0)
        throw std::invalid_argument("resolvent needs Re k > 0 and Im k >= 0");
}

// Values of phi1, phi2 at the Nystrom nodes for all modes, [ell][node].
struct NodeValues {
    std::vector<double> s;  // sqrt(rho * cell width)
    std::vector<std::vector<ComplexL>> phi1, phi2;
    std::vector<ComplexL> wronskian;
};

NodeValues node_values(const ScattererSpec& spec, ComplexL k, const RadialMesh& mesh, int l_max) {
    const int n = mesh.cells();
    NodeValues nv;
    nv.s.resize(n);
    nv.phi1.assign(l_max + 1, std::vector<ComplexL>(n));
    nv.phi2.assign(l_max + 1, std::vector<ComplexL>(n));
    nv.wronskian.resize(l_max + 1);
    const InterfaceTables it = interface_tables(spec, l_max, k);
    std::vector<ModeCoefficients> coeffs(l_max + 1);
    for (int l = 0; l <= l_max; ++l) {
        coeffs[l] = mode_coefficients(spec, l, k, it);
        nv.wronskian[l] = coeffs[l].W;
    }
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
        const double lo = mesh.edges[i], hi = mesh.edges[i + 1];
        const double r = 0.5 * (lo + hi);
        nv.s[i] = std::sqrt(weight(spec, r) * std::pow(r, spec.dimension - 1) * (hi - lo));
        const BesselTable t = bessel_table(spec.family(), l_max, node_argument(spec, k, r), true);
        for (int l = 0; l <= l_max; ++l) {
            const ModalSolutions s = solutions_at(spec, l, k, r, coeffs[l], t);
            nv.phi1[l][i] = s.phi1;
            nv.phi2[l][i] = s.phi2;
        }
    });
    return nv;
}

// y = M x with M_ij = -s_i s_j phi1(r_min(i,j)) phi2(r_max(i,j)) / W.
void green_apply(const std::vector<double>& s, const std::vector<ComplexL>& phi1,
                 const std::vector<ComplexL>& phi2, ComplexL w, const Eigen::VectorXcd& x,
                 Eigen::VectorXcd& y) {
    const int n = static_cast<int>(s.size());
    std::vector<ComplexL> acc(n);
    ComplexL sum(0.0L);
    for (int i = 0; i < n; ++i) {
        const ComplexL xi(x(i).real(), x(i).imag());
        sum += phi1[i] * (Real(s[i]) * xi);
        acc[i] = phi2[i] * sum;
    }
    sum = 0.0L;
    const ComplexL scale = -1.0L / w;
    y.resize(n);
    for (int i = n - 1; i >= 0; --i) {
        acc[i] += phi1[i] * sum;
        const ComplexL xi(x(i).real(), x(i).imag());
        sum += phi2[i] * (Real(s[i]) * xi);
        const ComplexL v = acc[i] * scale * Real(s[i]);
        y(i) = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
    }
}

double nystrom_mode_norm(const NodeValues& nv, int ell) {
    const int n = static_cast<int>(nv.s.size());
    const auto& p1 = nv.phi1[ell];
    const auto& p2 = nv.phi2[ell];
    const ComplexL w = nv.wronskian[ell];
    auto apply = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        green_apply(nv.s, p1, p2, w, x, y);
    };
    // The kernel is complex symmetric, so M^H x = conj(M conj(x)).
    auto adjoint = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) {
        green_apply(nv.s, p1, p2, w, x.conjugate(), y);
        y = y.conjugate();
    };
    return detail::largest_singular_value(n, apply, adjoint);
}

// ---------------------------------------------------------------------------
// Finite-volume system on mesh vertices.

struct FvSystem {
    int first = 0;                 // first active vertex
    std::vector<ComplexL> diag;    // active vertices only
    std::vector<Real> off;         // coupling between active i and i+1 (negated flux coeff)
    std::vector<Real> mass;
};

Real radial_power_integral(int dimension, Real lo, Real hi) {
    return dimension == 3 ? (hi * hi * hi - lo * lo * lo) / 3.0L : (hi * hi - lo * lo) / 2.0L;
}

FvSystem fv_system(const ScattererSpec& spec, ComplexL k, int ell, const RadialMesh& mesh) {
    const int nv = mesh.cells() + 1;
    const auto& e = mesh.edges;
    const Real a = spec.radius;
    const Real lam_angular = angular(spec.dimension, ell);
    bool dirichlet_first = false;
    if (spec.kind == ScattererKind::ImpenetrableDirichlet) dirichlet_first = true;
    if (!spec.is_impenetrable() && ell > 0) dirichlet_first = true;

    FvSystem sys;
    sys.first = dirichlet_first ? 1 : 0;
    const int m = nv - sys.first;
    sys.diag.assign(m, ComplexL(0));
    sys.off.assign(std::max(m - 1, 0), 0.0L);
    sys.mass.assign(m, 0.0L);

    auto region_w = [&](Real r) { return Real(weight(spec, static_cast<double>(r))); };
    auto region_s = [&](Real r) { return Real(flux_weight(spec, static_cast<double>(r))); };
    const ComplexL lambda = k * k;

    for (int v = sys.first; v < nv; ++v) {
        const int i = v - sys.first;
        Real lo = v > 0 ? 0.5L * (Real(e[v - 1]) + Real(e[v])) : Real(e[0]);
        Real hi = v + 1 < nv ? 0.5L * (Real(e[v]) + Real(e[v + 1])) : Real(e[nv - 1]);
        // Integrate rho and q over the dual cell, split at the interface.
        Real mass = 0.0L, pot = 0.0L;
        Real pieces[3] = {lo, hi, hi};
        int np = 1;
        if (spec.is_penetrable() && lo < a && a < hi) {
            pieces[1] = a;
            np = 2;
        }
        for (int p = 0; p < np; ++p) {
            const Real plo = pieces[p], phi = pieces[p + 1];
            const Real mid = 0.5L * (plo + phi);
            mass += region_w(mid) * radial_power_integral(spec.dimension, plo, phi);
            if (lam_angular != 0.0L) {
                const Real integral =
                    spec.dimension == 3 ? (phi - plo) : std::log(phi / plo);
                pot += region_s(mid) * lam_angular * integral;
            }
        }
        sys.mass[i] = mass;
        sys.diag[i] = pot - lambda * mass;
    }
    for (int v = 0; v + 1 < nv; ++v) {
        const Real mid = 0.5L * (Real(e[v]) + Real(e[v + 1]));
        const Real coef = region_s(mid) * std::pow(mid, Real(spec.dimension - 1)) /
                          (Real(e[v + 1]) - Real(e[v]));
        if (v >= sys.first) sys.diag[v - sys.first] += coef;
        if (v + 1 >= sys.first) sys.diag[v + 1 - sys.first] += coef;
        if (v >= sys.first) sys.off[v - sys.first] = -coef;
    }
    const Real r_max = e[nv - 1];
    sys.diag[m - 1] -= std::pow(r_max, Real(spec.dimension - 1)) *
                       outgoing_robin(spec, ell, k, static_cast<double>(r_max));
    return sys;
}

// Thomas algorithm for the complex symmetric tridiagonal system.
std::vector<ComplexL> fv_solve(const FvSystem& sys, const std::vector<ComplexL>& rhs,
                               bool conjugate) {
    const int m = static_cast<int>(sys.diag.size());
    std::vector<ComplexL> c(m), d(m);
    auto dg = [&](int i) { return conjugate ? std::conj(sys.diag[i]) : sys.diag[i]; };
    Real scale = 0.0L;
    for (int i = 0; i < m; ++i) scale = std::max(scale, std::abs(sys.diag[i]));
    ComplexL piv = dg(0);
    for (int i = 0; i < m; ++i) {
        if (i > 0) piv = dg(i) - sys.off[i - 1] * c[i - 1];
        if (std::abs(piv) <= 1e-30L * scale) throw PivotError("singular modal system");
        c[i] = i + 1 < m ? sys.off[i] / piv : ComplexL(0);
        d[i] = ((i > 0 ? rhs[i] - sys.off[i - 1] * d[i - 1] : rhs[i])) / piv;
    }
    for (int i = m - 2; i >= 0; --i) d[i] -= c[i] * d[i + 1];
    return d;
}

double fd_mode_norm(const ScattererSpec& spec, ComplexL k, int ell, const RadialMesh& mesh) {
    const FvSystem sys = fv_system(spec, k, ell, mesh);
    const int m = static_cast<int>(sys.diag.size());
    std::vector<Real> sq(m);
    for (int i = 0; i < m; ++i) sq[i] = std::sqrt(sys.mass[i]);
    auto run = [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y, bool conj) {
        std::vector<ComplexL> rhs(m);
        for (int i = 0; i < m; ++i) rhs[i] = sq[i] * ComplexL(x(i).real(), x(i).imag());
        const auto u = fv_solve(sys, rhs, conj);
        y.resize(m);
        for (int i = 0; i < m; ++i) {
            const ComplexL v = sq[i] * u[i];
            y(i) = Complex(static_cast<double>(v.real()), static_cast<double>(v.imag()));
        }
    };
    return detail::largest_singular_value(
        m, [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { run(x, y, false); },
        [&](const Eigen::VectorXcd& x, Eigen::VectorXcd& y) { run(x, y, true); });
}

int default_l_max(const ScattererSpec& spec, Complex k, double r_chi) {
    const double interior = spec.is_penetrable() ? spec.radius / spec.contrast : 0.0;
    return static_cast<int>(std::ceil(1.3 * std::abs(k) * std::max(r_chi, interior))) + 20;
}

}  // namespace

Complex modal_determinant(const ScattererSpec& spec, int ell, Complex k) {
    if (ell < 0) throw std::invalid_argument("mode must be non-negative");
    const auto v = modal_determinants(spec, ell, ComplexL(k.real(), k.imag()));
    return Complex(static_cast<double>(v[ell].value.real()),
                   static_cast<double>(v[ell].value.imag()));
}

std::vector<DeterminantValue> modal_determinants(const ScattererSpec& spec, int ell_max,
                                                 ComplexL k) {
    spec.validate();
    if (k == ComplexL(0)) throw SingularityError("modal determinant is singular at k = 0");
    const Real a = spec.radius;
    const int dim = spec.dimension;
    std::vector<DeterminantValue> out(ell_max + 1);
    if (spec.kind == ScattererKind::Free) {
        for (auto& d : out) {
            if (dim == 3) {
                d.value = -kI / (k * a * a);
                d.derivative = kI / (k * k * a * a);
            } else {
                d.value = -2.0L * kI / (kPi * a);
                d.derivative = 0.0L;
            }
        }
        return out;
    }
    const ComplexL za = k * a;
    const BesselTable to = bessel_table(spec.family(), ell_max, za, true);
    if (spec.is_impenetrable()) {
        const bool dirichlet = spec.kind == ScattererKind::ImpenetrableDirichlet;
        for (int l = 0; l <= ell_max; ++l) {
            const ComplexL h = to.h[l], hp = to.h_prime(l);
            if (dirichlet) {
                out[l] = {h, a * hp};
            } else {
                out[l] = {hp, a * second_derivative(dim, l, za, h, hp)};
            }
        }
        return out;
    }
    const Real c = spec.contrast, alpha = spec.alpha;
    const ComplexL zi = za / c;
    const std::vector<ComplexL> ji = bessel_j_orders(spec.family(), ell_max, zi);
    BesselTable tin;
    tin.family = spec.family();
    tin.z = zi;
    tin.j = ji;
    for (int l = 0; l <= ell_max; ++l) {
        const ComplexL f = ji[l], fp = tin.j_prime(l);
        const ComplexL fpp = second_derivative(dim, l, zi, f, fp);
        const ComplexL h = to.h[l], hp = to.h_prime(l);
        const ComplexL hpp = second_derivative(dim, l, za, h, hp);
        DeterminantValue d;
        d.value = (k / c) * fp * h - alpha * k * f * hp;
        d.derivative = fp * h / c + (k / c) * (a / c) * fpp * h + (k / c) * fp * a * hp -
                       alpha * f * hp - alpha * k * (a / c) * fp * hp - alpha * k * f * a * hpp;
        out[l] = d;
    }
    return out;
}

ModalSolutions modal_solutions(const ScattererSpec& spec, int ell, ComplexL k, double r) {
    spec.validate();
    if (!(r > 0.0)) throw std::invalid_argument("modal solutions need r > 0");
    if (spec.is_impenetrable() && r < spec.radius)
        throw std::invalid_argument("radius lies inside the obstacle");
    const InterfaceTables it = interface_tables(spec, ell, k);
    const ModeCoefficients m = mode_coefficients(spec, ell, k, it);
    const BesselTable t = bessel_table(spec.family(), ell, node_argument(spec, k, r), true);
    return solutions_at(spec, ell, k, r, m, t);
}

ComplexL outgoing_robin(const ScattererSpec& spec, int ell, ComplexL k, double r) {
    const BesselTable t = bessel_table(spec.family(), ell, k * Real(r), true);
    return k * t.h_prime(ell) / t.h[ell];
}

ResolventOptions resolve_options(const ScattererSpec& spec, Complex k, ResolventOptions opts) {
    spec.validate();
    if (opts.r_chi == 0.0) opts.r_chi = 2.0 * spec.radius;
    if (!(opts.r_chi > spec.radius))
        throw std::invalid_argument("cut-off radius must exceed the scatterer radius");
    if (opts.l_max < 0) opts.l_max = default_l_max(spec, k, opts.r_chi);
    if (opts.cells_per_radius <= 0) {
        const double speed = spec.is_penetrable() ? std::min(spec.contrast, 1.0) : 1.0;
        const double wavelength = speed * 2.0 * std::numbers::pi / std::abs(k);
        int n = static_cast<int>(std::ceil(spec.radius * opts.points_per_wavelength / wavelength));
        n = std::max(n, opts.min_cells_per_radius);
        opts.cells_per_radius = n + (n % 2);
    }
    return opts;
}

RadialMesh radial_mesh(const ScattererSpec& spec, Complex k, const ResolventOptions& given) {
    const ResolventOptions opts = resolve_options(spec, k, given);
    RadialMesh mesh;
    mesh.r_min = spec.is_impenetrable() ? spec.radius : 0.0;
    mesh.r_max = opts.r_chi;
    const int n = opts.cells_per_radius;
    mesh.width = spec.radius / n;
    for (long i = 0;; ++i) {
        const double r = mesh.r_min + spec.radius * static_cast<double>(i) / n;
        if (r >= mesh.r_max - 1e-12 * mesh.width) break;
        mesh.edges.push_back(r);
    }
    mesh.edges.push_back(mesh.r_max);
    return mesh;
}

double modal_norm(const ScattererSpec& spec, int ell, Complex k, const ResolventOptions& given) {
    check_frequency(k);
    const ResolventOptions opts = resolve_options(spec, k, given);
    const RadialMesh mesh = radial_mesh(spec, k, opts);
    const ComplexL kl(k.real(), k.imag());
    if (opts.method == ResolventMethod::FiniteDifference) return fd_mode_norm(spec, kl, ell, mesh);
    const NodeValues nv = node_values(spec, kl, mesh, ell);
    return nystrom_mode_norm(nv, ell);
}

ResolventEstimate resolvent_norm(const ScattererSpec& spec, Complex k,
                                 const ResolventOptions& given) {
    check_frequency(k);
    const ResolventOptions opts = resolve_options(spec, k, given);
    const RadialMesh mesh = radial_mesh(spec, k, opts);
    const ComplexL kl(k.real(), k.imag());
    const int l_max = opts.l_max;

    std::vector<double> norms(l_max + 1);
    if (opts.method == ResolventMethod::Nystrom) {
        const NodeValues nv = node_values(spec, kl, mesh, l_max);
        parallel_for(static_cast<std::size_t>(l_max + 1),
                     [&](std::size_t l) { norms[l] = nystrom_mode_norm(nv, static_cast<int>(l)); });
    } else {
        parallel_for(static_cast<std::size_t>(l_max + 1), [&](std::size_t l) {
            norms[l] = fd_mode_norm(spec, kl, static_cast<int>(l), mesh);
        });
    }

    ResolventEstimate est;
    est.k = k;
    est.r_chi = opts.r_chi;
    est.l_max = l_max;
    est.n_r = mesh.cells();
    for (int l = 0; l <= l_max; ++l) {
        est.per_mode.push_back({l, norms[l]});
        if (norms[l] > est.norm) {
            est.norm = norms[l];
            est.argmax_mode = l;
        }
    }
    if (opts.check_tail) {
        const int tail_start = std::max(
            0, std::min(static_cast<int>(std::ceil(1.3 * std::abs(k) * opts.r_chi)) + 10,
                        l_max - 5));
        for (int l = tail_start; l < l_max; ++l)
            if (norms[l + 1] > norms[l] * (1.0 + 1e-8))
                throw TruncationError("modal norms still growing at l = " + std::to_string(l + 1) +
                                      "; raise l_max");
    }
    return est;
}

double semiclassical_resolvent_norm(const ScattererSpec& spec, Complex z, double h,
                                    const ResolventOptions& opts) {
    if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
    if (!(z.imag() > 0.0)) throw std::invalid_argument("semiclassical bound needs Im z > 0");
    const Complex k = std::sqrt(z) / h;
    return resolvent_norm(spec, k, opts).norm / (h * h);
}

NearPoleProfile near_pole_norms(const ScattererSpec& spec, int ell, double k_ref,
                                const std::vector<long double>& offsets,
                                const ResolventOptions& opts) {
    const ResolventEstimate est = resolvent_norm(spec, Complex(k_ref, 0.0), opts);
    NearPoleProfile prof;
    prof.k_ref = k_ref;
    prof.ell = ell;
    for (const auto& m : est.per_mode) {
        if (m.ell == ell)
            prof.mode_norm = m.norm;
        else
            prof.background = std::max(prof.background, m.norm);
    }
    if (ell > est.l_max) prof.mode_norm = modal_norm(spec, ell, Complex(k_ref, 0.0), opts);
    const DeterminantValue d = modal_determinants(spec, ell, ComplexL(k_ref, 0.0L))[ell];
    prof.pole_offset = -d.value / d.derivative;
    prof.offsets = offsets;
    const Real base = std::abs(d.value);
    for (const Real t : offsets) {
        const Real ratio = base / std::abs(d.value + d.derivative * t);
        prof.norms.push_back(std::max(prof.background, prof.mode_norm * static_cast<double>(ratio)));
    }
    return prof;
}

RadialSolution apply_resolvent(const ScattererSpec& spec, Complex k, int ell,
                               const std::vector<Complex>& source, const RadialMesh& mesh) {
    spec.validate();
    if (k == Complex(0.0)) throw SingularityError("resolvent at k = 0");
    const int nv = mesh.cells() + 1;
    if (static_cast<int>(source.size()) != nv)
        throw std::invalid_argument("source must have one value per mesh vertex");
    const ComplexL kl(k.real(), k.imag());
    const FvSystem sys = fv_system(spec, kl, ell, mesh);
    const int m = static_cast<int>(sys.diag.size());
    std::vector<ComplexL> rhs(m);
    for (int i = 0; i < m; ++i) {
        const Complex f = source[i + sys.first];
        rhs[i] = sys.mass[i] * ComplexL(f.real(), f.imag());
    }
    const std::vector<ComplexL> u = fv_solve(sys, rhs, false);

    Real res = 0.0L, ref = 0.0L;
    for (int i = 0; i < m; ++i) {
        ComplexL au = sys.diag[i] * u[i];
        if (i > 0) au += sys.off[i - 1] * u[i - 1];
        if (i + 1 < m) au += sys.off[i] * u[i + 1];
        res += std::norm(au - rhs[i]);
        ref += std::norm(rhs[i]);
    }
    RadialSolution sol;
    sol.r = mesh.edges;
    sol.u.assign(nv, Complex(0.0));
    for (int i = 0; i < m; ++i)
        sol.u[i + sys.first] =
            Complex(static_cast<double>(u[i].real()), static_cast<double>(u[i].imag()));
    sol.relative_residual = ref > 0.0L ? static_cast<double>(std::sqrt(res / ref)) : 0.0;
    if (sol.relative_residual > 1e-8)
        throw PivotError("modal solve residual " + std::to_string(sol.relative_residual));
    return sol;
}

RadialSolution apply_resolvent(const ScattererSpec& spec, Complex k, int ell,
                               const std::function<Complex(double)>& source,
                               const RadialMesh& mesh) {
    std::vector<Complex> f(mesh.edges.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = source(mesh.edges[i]);
    return apply_resolvent(spec, k, ell, f, mesh);
}

}  // namespace trapwave
