#pragma once

// End-to-end pipeline and serialization used by the command-line tool.

#include <string>
#include <vector>

#include <json.hpp>

#include "cridx/crgeom.hpp"
#include "cridx/defexpr.hpp"
#include "cridx/indices.hpp"

namespace cridx {

inline constexpr const char* kToolVersion = "cridx 0.1.0";

/// Bound on the hermitian defect of A checked in `consistency`.
inline constexpr double kHermitianDefectTol = 1e-6;
/// Slack of the strong Oka check: min eig A >= margin - kStrongOkaSlack.
inline constexpr double kStrongOkaSlack = 1e-4;

struct AnalysisOptions {
    bool optimize = true;
    bool oracles = true;
    /// Evaluation budget of each optimization (-1: optimizer.budget).
    int budget = -1;
};

struct Analysis {
    DomainSpec spec;
    std::vector<BoundaryPoint> samples;  // uniform samples, then refined weak points
    int n_uniform = 0;
    std::vector<PointGeometry> geoms;

    /// eta_rho.
    std::vector<PointThreshold> baseline_thresholds;
    IndexSummary baseline;

    OptimizationResult df_opt;
    OptimizationResult s_opt;
    /// DF fields from df_opt, Steinness fields from s_opt.
    std::vector<PointThreshold> per_point;
    IndexSummary indices;

    ExponentSearch interior;
    ExponentSearch exterior;
    double boas_straube_max_defect = 0.0;
    double strong_oka_margin = 0.0;
    double weak_min_eig_A = kInf;
    bool strong_oka_ok = true;
    bool theorem1_ok = true;
};

/// Samples, analyzes every point, optimizes the trivialization and runs the
/// oracles. Throws SamplingError, PseudoconvexityError.
Analysis analyze_domain(const DomainSpec& spec, const AnalysisOptions& options = {});

/// True when the oracle exponents are bounded by the boundary indices, A is
/// hermitian to kHermitianDefectTol and the strong Oka check holds.
bool consistency_ok(const Analysis& a);

/// Infinite values become the string "inf".
nlohmann::json json_number(double x);

nlohmann::json manifest_json(const DomainSpec& spec, const std::string& config_path, double duration_s);
nlohmann::json analysis_json(const Analysis& a, const std::string& config_path, double duration_s);
nlohmann::json certify_json(const Analysis& a, const std::string& config_path, double duration_s);
nlohmann::json oracle_json(const OracleVerdict& v);
nlohmann::json optimization_json(const OptimizationResult& r, Objective objective);

/// Header re_z1,im_z1,...,null_dim,gamma_df,gamma_s,marginal and one row per
/// entry of report["per_point"].
std::string emit_pointwise_csv(const nlohmann::json& report);

}  // namespace cridx
