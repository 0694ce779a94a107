#include "trapwave/resonance_finder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "trapwave/errors.hpp"
#include "trapwave/modal_resolvent.hpp"
#include "trapwave/parallel.hpp"

namespace trapwave {

namespace {

using Real = long double;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPhaseStep = std::numbers::pi / 3.0;
constexpr double kBoxFloor = 1e-8;

// Contour data accumulated along a path for a contiguous range of modes.
struct PathSums {
    std::vector<double> phase;      // total change of arg D
    std::vector<ComplexL> moment1;  // integral of k D'/D dk
    std::vector<ComplexL> moment2;  // integral of k^2 D'/D dk
    std::vector<double> max_abs;    // max |D| on the path
};

struct Sample {
    ComplexL k;
    std::vector<DeterminantValue> d;  // modes ell_lo..ell_hi
};

class ModeRange {
public:
    ModeRange(const ScattererSpec& spec, int lo, int hi) : spec_(spec), lo_(lo), hi_(hi) {}

    int size() const { return hi_ - lo_ + 1; }
    int lo() const { return lo_; }

    Sample eval(ComplexL k) const {
        Sample s;
        s.k = k;
        auto all = modal_determinants(spec_, hi_, k);
        s.d.assign(all.begin() + lo_, all.end());
        for (const auto& v : s.d)
            if (!std::isfinite(std::abs(v.value)) || v.value == ComplexL(0) ||
                !std::isfinite(std::abs(v.derivative)))
                throw ContourError("determinant vanishes or overflows on the contour");
        return s;
    }

private:
    const ScattererSpec& spec_;
    int lo_, hi_;
};

bool needs_refinement(const Sample& a, const Sample& b) {
    const ComplexL dk = b.k - a.k;
    for (std::size_t l = 0; l < a.d.size(); ++l) {
        const double dphase = static_cast<double>(std::arg(b.d[l].value / a.d[l].value));
        if (std::fabs(dphase) > kPhaseStep) return true;
        const double pa = static_cast<double>(std::imag(a.d[l].derivative / a.d[l].value * dk));
        const double pb = static_cast<double>(std::imag(b.d[l].derivative / b.d[l].value * dk));
        if (std::fabs(pa) > kPhaseStep || std::fabs(pb) > kPhaseStep) return true;
    }
    return false;
}

void accumulate(const Sample& a, const Sample& b, PathSums& sums) {
    const ComplexL dk = b.k - a.k;
    for (std::size_t l = 0; l < a.d.size(); ++l) {
        sums.phase[l] += static_cast<double>(std::arg(b.d[l].value / a.d[l].value));
        const ComplexL ga = a.d[l].derivative / a.d[l].value;
        const ComplexL gb = b.d[l].derivative / b.d[l].value;
        sums.moment1[l] += 0.5L * (a.k * ga + b.k * gb) * dk;
        sums.moment2[l] += 0.5L * (a.k * a.k * ga + b.k * b.k * gb) * dk;
        sums.max_abs[l] = std::max({sums.max_abs[l], static_cast<double>(std::abs(a.d[l].value)),
                                    static_cast<double>(std::abs(b.d[l].value))});
    }
}

// Straight path p0 -> p1 sampled at `n` uniform steps, with steps bisected
// until every mode's phase moves by less than pi/3 per step.
PathSums trace_path(const ModeRange& modes, ComplexL p0, ComplexL p1, int n) {
    std::vector<Sample> base(n + 1);
    parallel_for(static_cast<std::size_t>(n + 1), [&](std::size_t i) {
        base[i] = modes.eval(p0 + (p1 - p0) * (Real(i) / Real(n)));
    });
    PathSums sums;
    const int m = modes.size();
    sums.phase.assign(m, 0.0);
    sums.moment1.assign(m, ComplexL(0));
    sums.moment2.assign(m, ComplexL(0));
    sums.max_abs.assign(m, 0.0);

    struct Segment {
        Sample a, b;
        int depth;
    };
    const Real min_step = std::abs(p1 - p0) / Real(n) * std::ldexp(1.0L, -24);
    for (int i = 0; i < n; ++i) {
        std::vector<Segment> stack{{base[i], base[i + 1], 0}};
        while (!stack.empty()) {
            Segment s = std::move(stack.back());
            stack.pop_back();
            if (needs_refinement(s.a, s.b)) {
                if (std::abs(s.b.k - s.a.k) < min_step)
                    throw ContourError("contour passes too close to a zero");
                Sample mid = modes.eval(0.5L * (s.a.k + s.b.k));
                // Push right half first so the left half is processed first.
                stack.push_back({mid, s.b, s.depth + 1});
                stack.push_back({s.a, std::move(mid), s.depth + 1});
                continue;
            }
            accumulate(s.a, s.b, sums);
        }
    }
    return sums;
}

int steps_for(double length, double step, int lo, int hi) {
    return std::clamp(static_cast<int>(std::ceil(length / step)), lo, hi);
}

struct BoxSums {
    double winding;
    ComplexL m1, m2;
    double max_abs;
};

// Counter-clockwise: bottom, right, top (reversed), left (reversed).
BoxSums box_sums(const ScattererSpec& spec, int ell, const SearchBox& b, int per_edge) {
    const ModeRange one(spec, ell, ell);
    const ComplexL c00(b.re_lo, b.im_lo), c10(b.re_hi, b.im_lo), c11(b.re_hi, b.im_hi),
        c01(b.re_lo, b.im_hi);
    BoxSums out{0.0, 0.0L, 0.0L, 0.0};
    const ComplexL corners[5] = {c00, c10, c11, c01, c00};
    for (int e = 0; e < 4; ++e) {
        const PathSums p = trace_path(one, corners[e], corners[e + 1], per_edge);
        out.winding += p.phase[0];
        out.m1 += p.moment1[0];
        out.m2 += p.moment2[0];
        out.max_abs = std::max(out.max_abs, p.max_abs[0]);
    }
    out.winding /= kTwoPi;
    const ComplexL norm(0.0L, static_cast<Real>(kTwoPi));
    out.m1 /= norm;
    out.m2 /= norm;
    return out;
}

int snap(double w) {
    const double r = std::round(w);
    if (std::fabs(w - r) > 0.05) throw ContourError("winding number is not near an integer");
    return static_cast<int>(r);
}

// Winding with the doubling check: base sampling and twice the base must agree.
struct Count {
    int count;
    BoxSums sums;
};

Count stable_count(const ScattererSpec& spec, int ell, const SearchBox& box, int per_edge) {
    int n = per_edge;
    BoxSums prev = box_sums(spec, ell, box, n);
    for (int doubling = 0; doubling < 3; ++doubling) {
        n *= 2;
        BoxSums next = box_sums(spec, ell, box, n);
        const double dw = std::fabs(next.winding - prev.winding);
        if (dw < 0.05 && std::fabs(next.winding - std::round(next.winding)) < 0.05)
            return {snap(next.winding), next};
        prev = next;
    }
    throw ContourError("winding number did not stabilize under refinement");
}

Count robust_count(const ScattererSpec& spec, int ell, SearchBox box, int per_edge) {
    const double shift = 1e-6 * std::max({std::fabs(box.re_hi - box.re_lo),
                                          std::fabs(box.im_hi - box.im_lo), 1e-3});
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return stable_count(spec, ell, box, per_edge);
        } catch (const ContourError&) {
            if (attempt == 3) throw;
            box.re_lo -= shift;
            box.re_hi += shift;
            box.im_lo -= shift;
            box.im_hi += shift;
        }
    }
    throw ContourError("contour too coarse");
}

int per_edge_for(const SearchBox& b) {
    const double side = std::max(b.re_hi - b.re_lo, b.im_hi - b.im_lo);
    return steps_for(side, 0.02, 32, 256);
}

DeterminantValue determinant_at(const ScattererSpec& spec, int ell, ComplexL k) {
    return modal_determinants(spec, ell, k)[ell];
}

struct BoxSolver {
    const ScattererSpec& spec;
    int ell;
    std::vector<Resonance> found;
    std::vector<ResonanceCluster> clusters;

    bool try_newton(ComplexL guess, const SearchBox& box, double scale) {
        const NewtonResult nr =
            refine_resonance(spec, ell, Complex(static_cast<double>(guess.real()),
                                                static_cast<double>(guess.imag())));
        if (!nr.converged || !box.contains(nr.k, 1e-12)) return false;
        for (const auto& r : found)
            if (std::abs(r.k - nr.k) < kBoxFloor) return false;
        Resonance r;
        r.k = nr.k;
        r.ell = ell;
        r.multiplicity = mode_multiplicity(spec.dimension, ell);
        r.newton_iterations = nr.iterations;
        const auto d = determinant_at(spec, ell, ComplexL(nr.k.real(), nr.k.imag()));
        r.residual = scale > 0.0 ? static_cast<double>(std::abs(d.value)) / scale : 0.0;
        found.push_back(r);
        return true;
    }

    void solve(const SearchBox& box, const Count& c) {
        if (c.count <= 0) return;
        const std::size_t before = found.size();
        if (c.count == 1) {
            if (try_newton(c.sums.m1, box, c.sums.max_abs)) return;
        } else if (c.count == 2) {
            // Roots of z^2 - s1 z + (s1^2 - s2)/2 from the first two moments.
            const ComplexL s1 = c.sums.m1, s2 = c.sums.m2;
            const ComplexL p = 0.5L * (s1 * s1 - s2);
            const ComplexL disc = std::sqrt(s1 * s1 - 4.0L * p);
            try_newton(0.5L * (s1 + disc), box, c.sums.max_abs);
            try_newton(0.5L * (s1 - disc), box, c.sums.max_abs);
            if (found.size() - before == 2) return;
            found.resize(before);
        }
        const double w = box.re_hi - box.re_lo, h = box.im_hi - box.im_lo;
        if (std::max(w, h) < kBoxFloor) {
            if (c.count == 1) {
                try_newton(ComplexL(0.5L * (box.re_lo + box.re_hi), 0.5L * (box.im_lo + box.im_hi)),
                           box, c.sums.max_abs);
            } else {
                clusters.push_back({Complex(0.5 * (box.re_lo + box.re_hi),
                                            0.5 * (box.im_lo + box.im_hi)),
                                    ell, c.count});
            }
            return;
        }
        SearchBox a = box, b = box;
        if (w >= h) {
            a.re_hi = b.re_lo = 0.5 * (box.re_lo + box.re_hi);
        } else {
            a.im_hi = b.im_lo = 0.5 * (box.im_lo + box.im_hi);
        }
        const Count ca = robust_count(spec, ell, a, per_edge_for(a));
        solve(a, ca);
        const Count cb = robust_count(spec, ell, b, per_edge_for(b));
        solve(b, cb);
    }
};

bool resonance_less(const Resonance& x, const Resonance& y) {
    if (x.k.real() != y.k.real()) return x.k.real() < y.k.real();
    if (x.ell != y.ell) return x.ell < y.ell;
    return x.k.imag() < y.k.imag();
}

}  // namespace

NewtonResult refine_resonance(const ScattererSpec& spec, int ell, Complex guess, int max_iter) {
    NewtonResult out;
    ComplexL k(guess.real(), guess.imag());
    int polish = 0;
    for (int it = 1; it <= max_iter; ++it) {
        const DeterminantValue d = determinant_at(spec, ell, k);
        if (d.derivative == ComplexL(0)) break;
        const ComplexL step = d.value / d.derivative;
        k -= step;
        out.iterations = it;
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag()) || k == ComplexL(0)) break;
        // The real part settles first; a few extra steps let the imaginary
        // part, which may be many orders smaller, converge relatively.
        if (std::abs(step) <= 1e-10L) {
            const bool im_settled = std::fabs(step.imag()) <= 1e-8L * std::fabs(k.imag());
            if (im_settled || ++polish >= 6) {
                out.converged = true;
                break;
            }
        }
    }
    out.k = Complex(static_cast<double>(k.real()), static_cast<double>(k.imag()));
    return out;
}

int count_in_box(const ScattererSpec& spec, int ell, const SearchBox& box) {
    spec.validate();
    if (!(box.re_hi > box.re_lo) || !(box.im_hi > box.im_lo))
        throw std::invalid_argument("search box must have positive width and height");
    return robust_count(spec, ell, box, 256).count;
}

std::vector<Resonance> find_resonances_in_box(const ScattererSpec& spec, int ell,
                                              const SearchBox& box) {
    spec.validate();
    BoxSolver solver{spec, ell, {}, {}};
    solver.solve(box, robust_count(spec, ell, box, per_edge_for(box)));
    std::sort(solver.found.begin(), solver.found.end(), resonance_less);
    return solver.found;
}

ResonanceCatalog find_resonances(const ScattererSpec& spec, double k_max, double strip_depth,
                                 int ell_max, const FinderOptions& opts) {
    spec.validate();
    if (!(k_max > 0.0) || k_max > 200.0) throw std::invalid_argument("k_max must lie in (0, 200]");
    if (!(strip_depth > 0.0) || strip_depth > 5.0)
        throw std::invalid_argument("strip depth must lie in (0, 5]");
    const double a = spec.radius;
    ResonanceCatalog cat;
    cat.spec = spec;
    cat.strip_depth = strip_depth;
    cat.k_max = k_max;
    cat.re_min = opts.re_min < 0.0 ? 0.1 / a : opts.re_min;
    const double speed = spec.is_penetrable() ? std::min(spec.contrast, 1.0) : 1.0;
    cat.ell_max = ell_max >= 0 ? ell_max : static_cast<int>(std::ceil(k_max * a / speed)) + 10;
    if (spec.kind == ScattererKind::Free) return cat;
    if (!(cat.re_min < k_max)) throw std::invalid_argument("empty search interval");

    const double im_lo = -strip_depth / a, im_hi = opts.top / a;
    const double width = opts.column_width > 0.0 ? opts.column_width : 0.5 / a;
    const int columns = std::max(1, static_cast<int>(std::ceil((k_max - cat.re_min) / width)));
    std::vector<double> xs(columns + 1);
    for (int j = 0; j <= columns; ++j)
        xs[j] = j == columns ? k_max : cat.re_min + (k_max - cat.re_min) * j / columns;

    const ModeRange all(spec, 0, cat.ell_max);
    const int n_lines = columns + 1;
    const double step = 0.02;

    // Winding of every mode in every column, at base sampling and doubled.
    auto column_windings = [&](double h, std::vector<PathSums>& v, std::vector<PathSums>& bot,
                               std::vector<PathSums>& top) {
        v.resize(n_lines);
        bot.resize(columns);
        top.resize(columns);
        for (int j = 0; j < n_lines; ++j)
            v[j] = trace_path(all, ComplexL(xs[j], im_lo), ComplexL(xs[j], im_hi),
                              steps_for(im_hi - im_lo, h, 8, 1 << 20));
        for (int j = 0; j < columns; ++j) {
            const int n = steps_for(xs[j + 1] - xs[j], h, 4, 1 << 20);
            bot[j] = trace_path(all, ComplexL(xs[j], im_lo), ComplexL(xs[j + 1], im_lo), n);
            top[j] = trace_path(all, ComplexL(xs[j], im_hi), ComplexL(xs[j + 1], im_hi), n);
        }
    };
    auto winding = [&](const std::vector<PathSums>& v, const std::vector<PathSums>& bot,
                       const std::vector<PathSums>& top, int j, int l) {
        return (bot[j].phase[l] + v[j + 1].phase[l] - top[j].phase[l] - v[j].phase[l]) / kTwoPi;
    };

    std::vector<PathSums> v1, b1, t1, v2, b2, t2;
    column_windings(step, v1, b1, t1);
    column_windings(step / 2, v2, b2, t2);

    std::vector<std::vector<Resonance>> per_mode(cat.ell_max + 1);
    std::vector<std::vector<ResonanceCluster>> per_mode_clusters(cat.ell_max + 1);
    parallel_for(static_cast<std::size_t>(cat.ell_max + 1), [&](std::size_t lu) {
        const int l = static_cast<int>(lu);
        BoxSolver solver{spec, l, {}, {}};
        for (int j = 0; j < columns; ++j) {
            const SearchBox box{xs[j], xs[j + 1], im_lo, im_hi};
            const double w1 = winding(v1, b1, t1, j, l), w2 = winding(v2, b2, t2, j, l);
            Count c{0, {}};
            if (std::fabs(w1 - w2) < 0.05 && std::fabs(w2 - std::round(w2)) < 0.05) {
                c.count = static_cast<int>(std::round(w2));
                c.sums.winding = w2;
                const ComplexL norm(0.0L, static_cast<Real>(kTwoPi));
                c.sums.m1 = (b2[j].moment1[l] + v2[j + 1].moment1[l] - t2[j].moment1[l] -
                             v2[j].moment1[l]) / norm;
                c.sums.m2 = (b2[j].moment2[l] + v2[j + 1].moment2[l] - t2[j].moment2[l] -
                             v2[j].moment2[l]) / norm;
                c.sums.max_abs = std::max({b2[j].max_abs[l], v2[j + 1].max_abs[l],
                                           t2[j].max_abs[l], v2[j].max_abs[l]});
            } else {
                c = robust_count(spec, l, box, per_edge_for(box));
            }
            if (c.count < 0) throw ContourError("negative winding number");
            solver.solve(box, c);
        }
        per_mode[l] = std::move(solver.found);
        per_mode_clusters[l] = std::move(solver.clusters);
    });

    for (int l = 0; l <= cat.ell_max; ++l) {
        for (const auto& r : per_mode[l])
            if (r.k.imag() < 0.0) cat.entries.push_back(r);
        for (const auto& c : per_mode_clusters[l]) cat.clusters.push_back(c);
    }
    std::sort(cat.entries.begin(), cat.entries.end(), resonance_less);
    // Roots found from two adjacent columns sharing an edge.
    std::vector<Resonance> unique;
    for (const auto& r : cat.entries) {
        bool dup = false;
        for (auto it = unique.rbegin(); it != unique.rend(); ++it) {
            if (r.k.real() - it->k.real() > kBoxFloor) break;
            if (it->ell == r.ell && std::abs(it->k - r.k) < kBoxFloor) dup = true;
        }
        if (!dup) unique.push_back(r);
    }
    cat.entries = std::move(unique);
    return cat;
}

AsymptoticsReport check_asymptotics(const ResonanceCatalog& catalog, int ell_lo, int ell_hi,
                                    int max_index) {
    if (!catalog.spec.is_penetrable())
        throw NotApplicableError("asymptotics check needs a penetrable catalog");
    const double c = catalog.spec.contrast, a = catalog.spec.radius;
    const std::vector<double> zeros = airy_neg_zeros(std::max(1, max_index));
    AsymptoticsReport rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int l = ell_lo; l <= ell_hi; ++l) {
        const double nu = l + 0.5;
        for (int i = 1; i <= max_index; ++i) {
            AsymptoticResidual row;
            row.nu = nu;
            row.index = i;
            const double shift = zeros[i - 1] * std::cbrt(nu / 2.0);
            row.predicted_re_k = c * (nu + shift) / a;
            double best = INFINITY;
            for (const auto& e : catalog.entries) {
                if (e.ell != l) continue;
                const double r = e.k.real() * a / c - nu - shift;
                if (std::fabs(r) < std::fabs(best)) {
                    best = r;
                    row.matched_k = e.k;
                }
            }
            if (std::fabs(best) <= 3.0) {
                row.matched = true;
                row.residual = best;
                rep.max_abs_residual = std::max(rep.max_abs_residual, std::fabs(best));
                sx += nu;
                sy += best;
                sxx += nu * nu;
                sxy += nu * best;
                ++n;
            } else {
                ++rep.unmatched;
            }
            rep.rows.push_back(row);
        }
    }
    if (n >= 2) rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

CountingValue counting_function(const ResonanceCatalog& catalog, double r) {
    CountingValue v;
    v.truncated = r > catalog.k_max;
    for (const auto& e : catalog.entries)
        if (std::abs(e.k) <= r) v.count += e.multiplicity;
    return v;
}

Json resonance_to_json(const Resonance& r) {
    Json j;
    j["re"] = r.k.real();
    j["im"] = r.k.imag();
    j["ell"] = r.ell;
    j["multiplicity"] = r.multiplicity;
    j["residual"] = r.residual;
    return j;
}

std::string catalog_to_jsonl(const ResonanceCatalog& catalog) {
    std::string out;
    for (const auto& r : catalog.entries) {
        out += resonance_to_json(r).dump();
        out += '\n';
    }
    return out;
}

std::vector<Resonance> catalog_from_jsonl(const std::string& text, int dimension) {
    std::vector<Resonance> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const Json j = Json::parse(line);
        Resonance r;
        r.k = Complex(j.at("re").get<double>(), j.at("im").get<double>());
        r.ell = j.at("ell").get<int>();
        r.multiplicity = j.contains("multiplicity") ? j["multiplicity"].get<int>()
                                                    : mode_multiplicity(dimension, r.ell);
        r.residual = j.value("residual", 0.0);
        out.push_back(r);
    }
    return out;
}

}  // namespace trapwave
