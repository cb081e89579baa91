#pragma once

// Index estimates. Per boundary point the Diederich-Fornaess and Steinness
// conditions reduce to rank-one semidefinite inequalities in (A, v); they are
// aggregated over the sampled weak points, optimized over conformal changes
// e^u eta_rho of the trivialization, and cross-checked against direct
// plurisubharmonicity tests of -(-rho)^gamma and rho^gamma off the boundary.

#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "cridx/crgeom.hpp"
#include "cridx/defexpr.hpp"
#include "cridx/wjet.hpp"

namespace cridx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct RankOne {
    /// sup{t >= 0 : A - t v v^* >= 0}; -1 when A itself is not PSD.
    double t_max = 0.0;
    /// v lies in the numerical range of A (false also for the -1 sentinel).
    bool range_ok = false;

    bool inadmissible() const { return t_max < 0.0; }
};

/// Tolerances are relative to scale = max(1, max |eig A|): A is PSD when
/// eig_min >= -psd_tol * scale, eigenvectors with eigenvalue <= psd_tol *
/// scale count as null, and v = 0 means |v| <= psd_tol.
RankOne rank_one_threshold(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& v, double psd_tol);

/// gamma = t / (1 + t) with t = inf -> 1, and its inverse (1 -> inf).
double gamma_from_t(double t);
double t_from_gamma(double gamma);

struct PointThreshold {
    int null_dim = 0;
    double gamma_df = 1.0;  // in [0, 1]
    double gamma_s = 1.0;   // in [1, inf]
    bool df_strict_ok = true;
    bool s_strict_ok = true;
    bool marginal = false;
};

/// DF part: gamma_df and df_strict_ok (other fields untouched).
void df_threshold(const FormPair& fp, const Tolerances& tol, PointThreshold& out);
/// Steinness part: gamma_s and s_strict_ok.
void steinness_threshold(const FormPair& fp, const Tolerances& tol, PointThreshold& out);
/// Both parts, plus null_dim.
PointThreshold point_threshold(const FormPair& fp, const Tolerances& tol);
/// Threshold of a sample under eta_rho (the defaults when Null is trivial).
PointThreshold point_threshold(const PointGeometry& g, const Tolerances& tol);

/// Forms for e^u eta_rho from those for eta_rho: v' = v + N^T grad_t u and
/// A' = A - N^T Hess_t u conj(N), with `u_jet` taken in the adapted frame.
FormPair conformal_transform(const FormPair& fp, const WJet& u_jet, const Eigen::MatrixXcd& null_basis);

struct IndexSummary {
    double df_w = 1.0;
    double df_s = 1.0;  // lower bound
    double s_w = 1.0;
    double s_s = 1.0;  // upper bound
    int n_weak_points = 0;
};

/// Weak points are those with null_dim > 0.
IndexSummary aggregate_indices(std::span<const PointThreshold> thresholds);

// ---------------------------------------------------------------------------
// Conformal trivializations u = sum c_i basis_i

enum class Objective { DF, Steinness };

/// Weak point prepared for fast evaluation: the forms are affine in the
/// coefficients, so only the base pair and one increment per basis function
/// are stored.
struct ConformalModel {
    std::size_t sample_index = 0;
    FormPair base;
    std::vector<Eigen::VectorXcd> dv;
    std::vector<Eigen::MatrixXcd> dA;
    bool marginal = false;
    int null_dim = 0;
};

std::vector<ConformalModel> build_conformal_models(const DomainSpec& spec, const std::vector<PointGeometry>& geoms);
FormPair apply_coefficients(const ConformalModel& m, std::span<const double> coeffs);

struct OptimizationResult {
    std::vector<double> coeffs;
    IndexSummary summary;
    /// Thresholds of every sample under the chosen trivialization.
    std::vector<PointThreshold> thresholds;
    double objective = 0.0;
    int evaluations = 0;
};

/// Objective value (smaller is better) of a coefficient vector.
double trivialization_objective(const std::vector<ConformalModel>& models, std::span<const double> coeffs,
                                const Tolerances& tol, Objective objective);

/// Seeded simplex search with `optimizer.restarts` restarts (the first from
/// c = 0) over the conformal basis. c = 0 is always evaluated, so the result
/// is never worse than eta_rho. Deterministic for a fixed sampling seed.
OptimizationResult optimize_trivialization(const DomainSpec& spec, const std::vector<PointGeometry>& geoms,
                                           Objective objective, int budget);

/// Thresholds of all samples for fixed coefficients.
OptimizationResult evaluate_trivialization(const DomainSpec& spec, const std::vector<PointGeometry>& geoms,
                                           std::span<const double> coeffs);

// ---------------------------------------------------------------------------
// Plurisubharmonicity oracles

enum class OracleSide { Interior, Exterior };

struct OracleWitness {
    std::vector<cplx> q;
    double distance = 0.0;
    double min_eig = 0.0;
};

struct OracleVerdict {
    double gamma = 0.0;
    OracleSide side = OracleSide::Interior;
    bool all_psd = true;
    /// (distance, smallest eigenvalue of the normalized Hessian) pairs; the
    /// Hessian of -(-rho)^gamma (or rho^gamma) divided by gamma |rho|^(gamma-1).
    std::vector<std::pair<double, double>> min_eig_by_distance;
    std::vector<OracleWitness> witnesses;  // at most 5
    int n_points = 0;
};

/// Off-boundary points q = p -+ d nu for every sample and distance, with the
/// order-2 data of rho needed by the oracles. Built once, reused for every gamma.
class OracleProbe {
public:
    OracleProbe(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, OracleSide side);

    OracleSide side() const { return side_; }
    int size() const { return static_cast<int>(points_.size()); }
    OracleVerdict evaluate(double gamma) const;
    bool all_psd(double gamma) const;
    /// Smallest eigenvalue of i ddbar(-log(-rho)) over the probe points.
    double log_hessian_margin() const;

private:
    struct Point {
        std::vector<cplx> q;
        double distance;
        double rho;
        Eigen::VectorXcd d;   // d rho / d z_j
        Eigen::MatrixXcd h;   // d^2 rho / d z_j d zbar_k
    };
    double min_eig(const Point& pt, double gamma, bool& ok) const;

    OracleSide side_;
    double psd_tol_;
    std::vector<double> distances_;
    std::vector<Point> points_;
};

OracleVerdict interior_psh_oracle(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double gamma);
OracleVerdict exterior_psh_oracle(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double gamma);

struct ExponentSearch {
    double exponent = 0.0;
    /// False when the coarse-grid check found a non-monotone predicate and
    /// the result comes from the full grid scan.
    bool monotone = true;
    int evaluations = 0;
};

/// Interior: largest gamma in [lo, hi] with -(-rho)^gamma psh (hi if it
/// holds at hi, 0 if it fails at lo). Exterior: smallest gamma in [lo, hi]
/// with rho^gamma psh (lo if it holds at lo, inf if it fails at hi).
ExponentSearch oracle_exponent_search(const OracleProbe& probe, const GammaGrid& grid);
ExponentSearch oracle_exponent_search(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples,
                                      OracleSide side);

/// Smallest eigenvalue of the complex Hessian of -log(-rho) over the interior
/// probe points (Euclidean metric).
double strong_oka_margin(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples);

}  // namespace cridx
