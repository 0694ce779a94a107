#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trapwave/special_functions.hpp"

namespace trapwave {

enum class CurveKind { Circle, TwoCircles };

/// Closed curve(s) in the plane sampled at equispaced parameter values, one
/// 2*pi-periodic parametrization per component (counterclockwise, so the unit
/// normal below points out of the enclosed obstacle).
struct Curve {
    CurveKind kind = CurveKind::Circle;
    double radius = 1.0;
    /// Distance between the two circles (closest points); 0 for a circle.
    double gap = 0.0;
    int components = 1;
    /// Points per component.
    int per_component = 0;

    std::vector<double> t;
    std::vector<double> x, y;
    std::vector<double> dx, dy;
    std::vector<double> ddx, ddy;
    std::vector<double> speed;
    std::vector<double> nx, ny;
    std::vector<double> curvature;
    std::vector<int> component;

    int size() const { return static_cast<int>(x.size()); }
    double diameter() const;
    /// Trapezoid weights |x'(t_j)| * 2 pi / per_component; the discrete L2 inner product.
    std::vector<double> weights() const;

    static Curve circle(double radius, int n);
    /// Two circles of equal radius, centres on the x axis, n points in total.
    static Curve two_circles(double radius, double gap, int n);
};

std::string to_string(CurveKind kind);

enum class LayerTag { S, D, Dprime, A, Aprime };

std::string to_string(LayerTag tag);

struct BoundaryOperatorMatrix {
    Eigen::MatrixXcd m;
    LayerTag tag = LayerTag::S;
    double k = 0.0;
    double eta = 0.0;
    /// Quadrature weights of the curve, for weighted norms.
    std::vector<double> weights;
};

/// Smallest N for which assemble accepts k on this curve: 16 k diameter,
/// rounded up to a multiple of 2 * components.
int required_points(const Curve& curve, double k);

/// The three layer operators at once; S, D, D' share kernel evaluations.
struct LayerSet {
    Eigen::MatrixXcd S, D, Dprime;
};

/// Nystrom matrices with the logarithmic kernel split on each component
/// (product quadrature for the log part, trapezoid for the rest). Throws
/// std::invalid_argument when the curve has fewer than required_points.
LayerSet assemble_layers(const Curve& curve, double k);

/// A = I/2 + D - i eta S and A' = I/2 + D' - i eta S.
Eigen::MatrixXcd combine(const Eigen::MatrixXcd& half_plus, const Eigen::MatrixXcd& S,
                         double eta);

BoundaryOperatorMatrix assemble(const Curve& curve, double k, double eta, LayerTag tag);

struct InverseNorm {
    /// 1 / sigma_min; infinite when singular.
    double value = 0.0;
    bool singular = false;
    /// Lower estimate of sigma_min / sigma_max.
    double rcond = 0.0;
};

/// Inverse norm in the plain Euclidean norm.
InverseNorm inv_norm(const Eigen::MatrixXcd& m);
/// Inverse norm in the discrete L2 norm of the matrix's weights.
InverseNorm inv_norm(const BoundaryOperatorMatrix& m);

struct LayerSweepRecord {
    double k = 0.0;
    double inv_norm_A = 0.0;
    double inv_norm_Aprime = 0.0;
    bool spike = false;
};

struct LayerSweepOptions {
    /// eta = eta_factor * k.
    double eta_factor = 1.0;
    /// Points per component; 0 picks required_points at the top of the range.
    int points = 0;
    /// A spike is a strict local maximum at least spike_ratio times the median
    /// of the samples within median_half_width of it (itself excluded).
    double spike_ratio = 10.0;
    double median_half_width = 1.0;
};

/// Inverse norms of A and A' on `ks` (sorted ascending), with spike flags on A.
std::vector<LayerSweepRecord> spike_sweep(const Curve& shape, const std::vector<double>& ks,
                                          const LayerSweepOptions& opts = {});

/// Flags strict local maxima at least `ratio` times the local median.
std::vector<bool> detect_spikes(const std::vector<double>& ks, const std::vector<double>& values,
                                double ratio, double median_half_width);

}  // namespace trapwave
