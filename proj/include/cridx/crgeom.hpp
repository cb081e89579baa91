#pragma once

// Boundary geometry of M = {rho = 0}: projection and sampling, adapted
// unitary frames, the Levi form with its null space, and the D'Angelo
// (1,0)-form omega together with dbar_b omega restricted to Null, for the
// trivialization induced by rho.
//
// Conventions. In a frame U the chart is z = p + U w. A tangent vector with
// components X (in the w_1..w_{n-1} coordinates) has Levi form
// sum_{j,k} levi(j,k) X_j conj(X_k). Columns of `eigvecs` and `null_basis`
// are such component vectors. FormPair entries are A(a,b) = H(X_a, X_b) and
// v(a) = omega(X_a) for the null basis vectors X_a, so the rank-one term
// omega ^ omega-bar is v v^*.

#include <vector>

#include <Eigen/Core>

#include "cridx/defexpr.hpp"
#include "cridx/wjet.hpp"

namespace cridx {

struct BoundaryPoint {
    std::vector<cplx> p;
    /// |d rho / dz| at p.
    double grad_norm = 0.0;
};

struct UnitaryFrame {
    Eigen::MatrixXcd U;
    /// The normal direction is always the last coordinate (1-based n).
    int normal_index = 0;
};

struct LeviData {
    Eigen::MatrixXcd levi;
    Eigen::VectorXd eigvals;  // ascending
    Eigen::MatrixXcd eigvecs;
    Eigen::MatrixXcd null_basis;
    bool pseudoconvex = true;
    /// Some eigenvalue lies within a factor 10 of the null cut on either side.
    bool marginal = false;
    /// |d rho| at the point.
    double grad_norm = 1.0;
    /// max(|d rho|, max |eigval|); the reference for relative tolerances.
    double scale = 1.0;

    int null_dim() const { return static_cast<int>(null_basis.cols()); }
};

struct FormPair {
    Eigen::VectorXcd v;
    Eigen::MatrixXcd A;  // symmetrized
    double hermitian_defect = 0.0;
};

/// Newton iteration q <- q - rho(q) grad/|grad|^2 on the realified coordinates.
/// Throws ProjectionError on a vanishing gradient or non-convergence and
/// DomainError when rho is undefined along the path.
BoundaryPoint project_to_boundary(const DomainSpec& spec, std::span<const cplx> q0);

/// `sampling.count` projected points from uniform starts in the box
/// [-box_radius, box_radius]^{2n}, de-duplicated at distance 1e-6.
/// Projections that leave the box are discarded.
/// Deterministic for a fixed seed. Throws SamplingError if fewer than
/// count/4 points were found.
std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec);

/// Relative smallest Levi eigenvalue eig_min / max(|d rho|, eig_max) at a boundary point.
double levi_weakness(const DomainSpec& spec, const BoundaryPoint& p);

/// Local search for weakly pseudoconvex points. Starting from the
/// `sampling.weak_refine` samples of smallest relative Levi eigenvalue, runs
/// a simplex search on the projected point and keeps every result whose
/// relative eigenvalue falls below null_eig_rel_tol. Returns only new points
/// (farther than 1e-6 from `samples` and from each other). Deterministic.
std::vector<BoundaryPoint> refine_weak_points(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);

/// Householder-type unitary U whose last column is the unit vector along
/// d rho / d zbar at p.
UnitaryFrame adapted_frame(const DomainSpec& spec, const BoundaryPoint& p);

/// Jet of rho in the chart w -> p + U w at w = 0.
WJet frame_jet(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame, int order);

LeviData levi_data(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame);
/// Same, from a precomputed frame jet of order >= 2.
LeviData levi_from_jet(const WJet& jet, const Tolerances& tol);

/// (A, v) for eta_rho on the null basis. Throws PreconditionError when the
/// null space is trivial or d rho / d wbar_n vanishes.
FormPair dangelo_forms(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame, const LeviData& levi);
/// Same, from a precomputed frame jet of order 3.
FormPair dangelo_from_jet(const WJet& jet, const LeviData& levi);

/// Tangential gradient d u / d w_j (j < n) and tangential complex Hessian
/// d^2 u / d w_j d wbar_k of a frame jet.
Eigen::VectorXcd tangential_gradient(const WJet& jet);
Eigen::MatrixXcd tangential_hessian(const WJet& jet);

/// Everything computed at one boundary sample.
struct PointGeometry {
    BoundaryPoint point;
    UnitaryFrame frame;
    LeviData levi;
    FormPair forms;  // empty when null_dim == 0
};

PointGeometry analyze_point(const DomainSpec& spec, const BoundaryPoint& p);

/// analyze_point over all samples (order-preserving parallel map). Throws
/// PseudoconvexityError naming the first non-pseudoconvex sample.
std::vector<PointGeometry> analyze_boundary(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);

}  // namespace cridx
