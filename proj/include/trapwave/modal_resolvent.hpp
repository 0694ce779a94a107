#pragma once

// Per-mode radial problems for a radially symmetric scatterer.
//
// For angular mode l the radial operator is the Sturm-Liouville operator
//   -(p u')' + q u = lambda rho u,   lambda = k^2,
// with rho = w r^{n-1}, p = s r^{n-1}, q = s L r^{n-3}, where (w, s) =
// (c^-2 alpha^-1, alpha^-1) inside a penetrable ball and (1, 1) elsewhere,
// and L = l(l+1) in 3-d or l^2 in 2-d. Norms are taken in L^2(rho dr), in
// which the operator is self-adjoint.

#include <functional>
#include <vector>

#include "trapwave/scatterer_models.hpp"
#include "trapwave/special_functions.hpp"

namespace trapwave {

/// D_l(k) and its k-derivative.
struct DeterminantValue {
    ComplexL value;
    ComplexL derivative;
};

/// Modal determinant: zero exactly at the resonances of mode l.
///   penetrable: (k/c) f_l'(ka/c) h_l(ka) - alpha k f_l(ka/c) h_l'(ka)
///   Dirichlet:  h_l(ka);  Neumann: h_l'(ka);  free: the penetrable formula
///   at c = alpha = 1, i.e. -i/(k a^2) in 3-d and -2i/(pi a) in 2-d.
/// f = j (3-d) or J (2-d), h = h^(1) or H^(1).
Complex modal_determinant(const ScattererSpec& spec, int ell, Complex k);

/// D_l and dD_l/dk for every l in 0..ell_max at one k, sharing Bessel tables.
std::vector<DeterminantValue> modal_determinants(const ScattererSpec& spec, int ell_max,
                                                 ComplexL k);

/// Regular (phi1, finite at the origin or satisfying the obstacle condition)
/// and outgoing (phi2) modal solutions and their r-derivatives.
struct ModalSolutions {
    ComplexL phi1, dphi1, phi2, dphi2;
};

/// phi1 equals f_l(kr/c) inside a penetrable ball and f_l(kr) in free space.
/// The r-derivative at r = a is taken from the outside.
ModalSolutions modal_solutions(const ScattererSpec& spec, int ell, ComplexL k, double r);

/// Cell mesh on [r_min, r_max]: uniform cells of width a / cells_per_radius, the
/// last one possibly shorter. r = a is always a cell edge.
struct RadialMesh {
    double r_min = 0.0;
    double r_max = 0.0;
    double width = 0.0;
    std::vector<double> edges;

    int cells() const { return static_cast<int>(edges.size()) - 1; }
};

enum class ResolventMethod {
    /// Midpoint Nystrom discretization of the exact modal Green kernel.
    Nystrom,
    /// Symmetric finite-volume discretization with the exact outgoing
    /// Robin coefficient at r_max.
    FiniteDifference,
};

struct ResolventOptions {
    /// Cut-off radius; 0 selects 2a.
    double r_chi = 0.0;
    /// Highest mode; negative selects ceil(1.3 |k| max(r_chi, a/c)) + 20.
    int l_max = -1;
    /// Cells per length a; 0 selects the wavelength rule below.
    int cells_per_radius = 0;
    double points_per_wavelength = 20.0;
    int min_cells_per_radius = 32;
    ResolventMethod method = ResolventMethod::Nystrom;
    /// Throw TruncationError when per-mode norms do not decay at the top modes.
    bool check_tail = true;
};

struct ModeNorm {
    int ell;
    double norm;
};

struct ResolventEstimate {
    Complex k;
    double norm = 0.0;
    int argmax_mode = 0;
    std::vector<ModeNorm> per_mode;
    double r_chi = 0.0;
    int l_max = 0;
    int n_r = 0;
};

/// Resolved defaults (r_chi, l_max, cells) for a spec and k.
ResolventOptions resolve_options(const ScattererSpec& spec, Complex k, ResolventOptions opts);

RadialMesh radial_mesh(const ScattererSpec& spec, Complex k, const ResolventOptions& opts);

/// Largest singular value of the cut-off modal resolvent for one mode.
double modal_norm(const ScattererSpec& spec, int ell, Complex k, const ResolventOptions& opts);

/// max over modes 0..l_max (ascending, first maximizer wins) of the modal
/// norms; by orthogonality of the angular decomposition this is the norm of
/// the cut-off resolvent up to the radial discretization. k must satisfy
/// Re k > 0 with Im k >= 0.
ResolventEstimate resolvent_norm(const ScattererSpec& spec, Complex k,
                                 const ResolventOptions& opts = {});

/// ||(h^2 P - z)^{-1}|| restricted to the cut-off region: h^-2 times the
/// resolvent norm at k = sqrt(z)/h (principal root).
double semiclassical_resolvent_norm(const ScattererSpec& spec, Complex z, double h,
                                    const ResolventOptions& opts = {});

/// Resolvent norm at the real frequencies k_ref + t for offsets t that may lie
/// far below the floating-point spacing at k_ref, as needed to resolve the
/// peak of a resonance with |Im k| ~ 1e-20. The kernel of mode `ell` is exact at
/// k_ref except for its Wronskian, which is expanded to first order in t
/// (the kernel's other factors vary by O(t)); the remaining modes are frozen
/// at k_ref.
struct NearPoleProfile {
    double k_ref = 0.0;
    int ell = 0;
    /// Zero of the linearized determinant relative to k_ref.
    ComplexL pole_offset;
    /// Largest norm over the other modes at k_ref.
    double background = 0.0;
    /// Mode `ell` norm at k_ref.
    double mode_norm = 0.0;
    std::vector<long double> offsets;
    std::vector<double> norms;
};

NearPoleProfile near_pole_norms(const ScattererSpec& spec, int ell, double k_ref,
                                const std::vector<long double>& offsets,
                                const ResolventOptions& opts = {});

/// Finite-volume solve of (P - k^2) u = f for one mode on the vertices of the
/// mesh. Nodes with a Dirichlet condition (r = 0 for l > 0, a Dirichlet
/// obstacle boundary) carry u = 0.
struct RadialSolution {
    std::vector<double> r;
    std::vector<Complex> u;
    double relative_residual = 0.0;
};

RadialSolution apply_resolvent(const ScattererSpec& spec, Complex k, int ell,
                               const std::vector<Complex>& source, const RadialMesh& mesh);

/// Convenience overload sampling a source function at the mesh vertices.
RadialSolution apply_resolvent(const ScattererSpec& spec, Complex k, int ell,
                               const std::function<Complex(double)>& source,
                               const RadialMesh& mesh);

/// Outgoing Robin coefficient k h_l'(kR) / h_l(kR).
ComplexL outgoing_robin(const ScattererSpec& spec, int ell, ComplexL k, double r);

}  // namespace trapwave
