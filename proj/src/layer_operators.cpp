#include "trapwave/layer_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lanczos.hpp"
#include "trapwave/parallel.hpp"

namespace trapwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;

void add_circle(Curve& c, double cx, double a, int n, int comp) {
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * j / n;
        const double ct = std::cos(t), st = std::sin(t);
        c.t.push_back(t);
        c.x.push_back(cx + a * ct);
        c.y.push_back(a * st);
        c.dx.push_back(-a * st);
        c.dy.push_back(a * ct);
        c.ddx.push_back(-a * ct);
        c.ddy.push_back(-a * st);
        c.speed.push_back(a);
        c.nx.push_back(ct);
        c.ny.push_back(st);
        c.curvature.push_back(1.0 / a);
        c.component.push_back(comp);
    }
}

void check_points(int n, int components) {
    if (n <= 0 || n % (2 * components) != 0)
        throw std::invalid_argument("points per component must be a positive even number");
}

// Log-splitting weights R_d for t_i - t_j = pi d / m on a component of 2m points.
std::vector<double> log_weights(int per_component) {
    const int m = per_component / 2;
    std::vector<double> r(per_component);
    for (int d = 0; d < per_component; ++d) {
        double s = 0.0;
        for (int q = 1; q < m; ++q) s += std::cos(q * kPi * d / m) / q;
        r[d] = -2.0 * kPi / m * s - kPi / (double(m) * m) * (d % 2 ? -1.0 : 1.0);
    }
    return r;
}

}  // namespace

double Curve::diameter() const {
    return kind == CurveKind::Circle ? 2.0 * radius : 4.0 * radius + gap;
}

std::vector<double> Curve::weights() const {
    std::vector<double> w(x.size());
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = speed[j] * 2.0 * kPi / per_component;
    return w;
}

Curve Curve::circle(double radius, int n) {
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    check_points(n, 1);
    Curve c;
    c.kind = CurveKind::Circle;
    c.radius = radius;
    c.per_component = n;
    add_circle(c, 0.0, radius, n, 0);
    return c;
}

Curve Curve::two_circles(double radius, double gap, int n) {
    if (!(radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
    if (!(gap > 0.0)) throw std::invalid_argument("gap between the circles must be positive");
    check_points(n, 2);
    Curve c;
    c.kind = CurveKind::TwoCircles;
    c.radius = radius;
    c.gap = gap;
    c.components = 2;
    c.per_component = n / 2;
    const double off = radius + 0.5 * gap;
    add_circle(c, -off, radius, n / 2, 0);
    add_circle(c, off, radius, n / 2, 1);
    return c;
}

std::string to_string(CurveKind kind) {
    return kind == CurveKind::Circle ? "circle" : "two_circles";
}

std::string to_string(LayerTag tag) {
    switch (tag) {
        case LayerTag::S: return "S";
        case LayerTag::D: return "D";
        case LayerTag::Dprime: return "Dprime";
        case LayerTag::A: return "A";
        case LayerTag::Aprime: return "Aprime";
    }
    return "?";
}

int required_points(const Curve& curve, double k) {
    const int step = 2 * curve.components;
    const int n = static_cast<int>(std::ceil(16.0 * k * curve.diameter() - 1e-9));
    return std::max(step, (n + step - 1) / step * step);
}

LayerSet assemble_layers(const Curve& c, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("layer operators need k > 0");
    const int n = c.size();
    const int need = required_points(c, k);
    if (n < need)
        throw std::invalid_argument("curve has " + std::to_string(n) + " points, k = " +
                                    std::to_string(k) + " needs at least " +
                                    std::to_string(need));
    const int pc = c.per_component;
    const std::vector<double> rw = log_weights(pc);
    const double h = 2.0 * kPi / pc;
    const Complex I(0.0, 1.0);

    LayerSet out{Eigen::MatrixXcd(n, n), Eigen::MatrixXcd(n, n), Eigen::MatrixXcd(n, n)};
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = 0; j < n; ++j) {
            const double sj = c.speed[j];
            if (i == j) {
                const double s = c.speed[i];
                // Limits of the smooth parts as y -> x.
                const Complex sd = (I / 4.0 - kEuler / (2.0 * kPi) -
                                    std::log(k * s / 2.0) / (2.0 * kPi)) * s;
                const double curv =
                    (c.nx[i] * c.ddx[i] + c.ny[i] * c.ddy[i]) / s / (4.0 * kPi);
                out.S(i, i) = rw[0] * (-sj / (4.0 * kPi)) + h * sd;
                out.D(i, i) = h * curv;
                out.Dprime(i, i) = h * curv;
                continue;
            }
            const double rx = c.x[i] - c.x[j], ry = c.y[i] - c.y[j];
            const double r = std::hypot(rx, ry);
            const double kr = k * r;
            const double J0 = ::j0(kr), Y0 = ::y0(kr), J1 = ::j1(kr), Y1 = ::y1(kr);
            const Complex H0(J0, Y0), H1(J1, Y1);
            // nu(y) . (x - y) / r and nu(x) . (y - x) / r.
            const double cd = (c.nx[j] * rx + c.ny[j] * ry) / r;
            const double cp = -(c.nx[i] * rx + c.ny[i] * ry) / r;
            const Complex m = I / 4.0 * H0 * sj;
            const Complex ld = I * k / 4.0 * H1 * cd * sj;
            const Complex lp = I * k / 4.0 * H1 * cp * sj;
            if (c.component[i] != c.component[j]) {
                out.S(i, j) = h * m;
                out.D(i, j) = h * ld;
                out.Dprime(i, j) = h * lp;
                continue;
            }
            const int d = ((i - j) % pc + pc) % pc;
            const double half = 0.5 * (c.t[i] - c.t[j]);
            const double lg = std::log(4.0 * std::sin(half) * std::sin(half));
            const double m1 = -J0 * sj / (4.0 * kPi);
            const double l1d = -k / (4.0 * kPi) * J1 * cd * sj;
            const double l1p = -k / (4.0 * kPi) * J1 * cp * sj;
            out.S(i, j) = rw[d] * m1 + h * (m - m1 * lg);
            out.D(i, j) = rw[d] * l1d + h * (ld - l1d * lg);
            out.Dprime(i, j) = rw[d] * l1p + h * (lp - l1p * lg);
        }
    });
    return out;
}

Eigen::MatrixXcd combine(const Eigen::MatrixXcd& half_plus, const Eigen::MatrixXcd& S,
                         double eta) {
    const Complex c(0.0, -eta);
    Eigen::MatrixXcd a = half_plus + c * S;
    a.diagonal().array() += 0.5;
    return a;
}

BoundaryOperatorMatrix assemble(const Curve& curve, double k, double eta, LayerTag tag) {
    LayerSet l = assemble_layers(curve, k);
    BoundaryOperatorMatrix out;
    out.tag = tag;
    out.k = k;
    out.eta = eta;
    out.weights = curve.weights();
    switch (tag) {
        case LayerTag::S: out.m = std::move(l.S); break;
        case LayerTag::D: out.m = std::move(l.D); break;
        case LayerTag::Dprime: out.m = std::move(l.Dprime); break;
        case LayerTag::A: out.m = combine(l.D, l.S, eta); break;
        case LayerTag::Aprime: out.m = combine(l.Dprime, l.S, eta); break;
    }
    return out;
}

InverseNorm inv_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("inv_norm needs a square matrix");
    const int n = static_cast<int>(m.rows());
    InverseNorm out;
    if (n == 0) return out;
    // sqrt(||M||_1 ||M||_inf) bounds sigma_max from above, so rcond is not overstated.
    const double n1 = m.cwiseAbs().colwise().sum().maxCoeff();
    const double ninf = m.cwiseAbs().rowwise().sum().maxCoeff();
    const double smax = std::sqrt(n1 * ninf);
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double umin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(umin > 0.0) || !std::isfinite(umin)) {
        out.value = std::numeric_limits<double>::infinity();
        out.singular = true;
        return out;
    }
    const double inv = detail::largest_singular_value(
        n, [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { w = lu.solve(v); },
        [&](const Eigen::VectorXcd& v, Eigen::VectorXcd& w) { w = lu.adjoint().solve(v); });
    out.rcond = 1.0 / (inv * smax);
    if (!std::isfinite(inv) || out.rcond < 1e3 * std::numeric_limits<double>::epsilon()) {
        out.value = std::numeric_limits<double>::infinity();
        out.singular = true;
        return out;
    }
    out.value = inv;
    return out;
}

InverseNorm inv_norm(const BoundaryOperatorMatrix& b) {
    if (b.weights.empty()) return inv_norm(b.m);
    const Eigen::ArrayXd sw =
        Eigen::Map<const Eigen::ArrayXd>(b.weights.data(), b.weights.size()).sqrt();
    // || W^{1/2} M^{-1} W^{-1/2} || = 1 / sigma_min(W^{1/2} M W^{-1/2}).
    Eigen::MatrixXcd scaled = sw.matrix().asDiagonal() * b.m;
    scaled = scaled * sw.inverse().matrix().asDiagonal();
    return inv_norm(scaled);
}

std::vector<bool> detect_spikes(const std::vector<double>& ks, const std::vector<double>& values,
                                double ratio, double median_half_width) {
    const std::size_t n = values.size();
    std::vector<bool> flag(n, false);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(values[i] > values[i - 1] && values[i] > values[i + 1])) continue;
        std::vector<double> local;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && std::fabs(ks[j] - ks[i]) <= median_half_width) local.push_back(values[j]);
        if (local.empty()) continue;
        std::sort(local.begin(), local.end());
        const std::size_t m = local.size();
        const double med = m % 2 ? local[m / 2] : 0.5 * (local[m / 2 - 1] + local[m / 2]);
        flag[i] = values[i] >= ratio * med;
    }
    return flag;
}

std::vector<LayerSweepRecord> spike_sweep(const Curve& shape, const std::vector<double>& ks,
                                          const LayerSweepOptions& opts) {
    if (ks.empty()) return {};
    if (!std::is_sorted(ks.begin(), ks.end()))
        throw std::invalid_argument("sweep frequencies must be sorted");
    int n = opts.points;
    if (n == 0) n = required_points(shape, ks.back()) / shape.components;
    const Curve curve = shape.kind == CurveKind::Circle
                            ? Curve::circle(shape.radius, n)
                            : Curve::two_circles(shape.radius, shape.gap, n * 2);
    const std::vector<double> w = curve.weights();
    std::vector<LayerSweepRecord> out(ks.size());
    parallel_for(ks.size(), [&](std::size_t i) {
        const double k = ks[i];
        const LayerSet l = assemble_layers(curve, k);
        const double eta = opts.eta_factor * k;
        BoundaryOperatorMatrix a{combine(l.D, l.S, eta), LayerTag::A, k, eta, w};
        BoundaryOperatorMatrix ap{combine(l.Dprime, l.S, eta), LayerTag::Aprime, k, eta, w};
        out[i].k = k;
        out[i].inv_norm_A = inv_norm(a).value;
        out[i].inv_norm_Aprime = inv_norm(ap).value;
    });
    std::vector<double> v(ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) v[i] = out[i].inv_norm_A;
    const std::vector<bool> f = detect_spikes(ks, v, opts.spike_ratio, opts.median_half_width);
    for (std::size_t i = 0; i < ks.size(); ++i) out[i].spike = f[i];
    return out;
}

}  // namespace trapwave
