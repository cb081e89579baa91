#include "cridx/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cridx/errors.hpp"

namespace cridx {
namespace {

using nlohmann::json;

std::string side_name(OracleSide s) { return s == OracleSide::Interior ? "interior" : "exterior"; }

json point_json(const std::vector<cplx>& p) {
    json out = json::array();
    for (const auto& c : p) out.push_back({c.real(), c.imag()});
    return out;
}

json summary_json(const IndexSummary& s) {
    return {{"df_w", json_number(s.df_w)},
            {"df_s_lower", json_number(s.df_s)},
            {"s_w", json_number(s.s_w)},
            {"s_s_upper", json_number(s.s_s)},
            {"n_weak_points", s.n_weak_points}};
}

std::string fmt(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double number_from(const json& j) {
    if (j.is_string()) return j.get<std::string>() == "-inf" ? -kInf : kInf;
    return j.get<double>();
}

json oracles_json(const Analysis& a) {
    return {{"interior_exponent", json_number(a.interior.exponent)},
            {"exterior_exponent", json_number(a.exterior.exponent)},
            {"interior_monotone", a.interior.monotone},
            {"exterior_monotone", a.exterior.monotone},
            {"interior_grid", {{"lo", a.spec.oracle.interior.lo}, {"hi", a.spec.oracle.interior.hi}, {"bisect_tol", a.spec.oracle.interior.bisect_tol}}},
            {"exterior_grid", {{"lo", a.spec.oracle.exterior.lo}, {"hi", a.spec.oracle.exterior.hi}, {"bisect_tol", a.spec.oracle.exterior.bisect_tol}}}};
}

json consistency_json(const Analysis& a) {
    return {{"theorem1_ok", a.theorem1_ok},
            {"boas_straube_max_defect", a.boas_straube_max_defect},
            {"boas_straube_ok", a.boas_straube_max_defect <= kHermitianDefectTol},
            {"strong_oka_margin", json_number(a.strong_oka_margin)},
            {"strong_oka_ok", a.strong_oka_ok},
            {"weak_min_eig_A", json_number(a.weak_min_eig_A)}};
}

}  // namespace

json json_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

Analysis analyze_domain(const DomainSpec& spec, const AnalysisOptions& options) {
    validate(spec);
    Analysis a;
    a.spec = spec;
    a.samples = sample_boundary(spec);
    a.n_uniform = static_cast<int>(a.samples.size());
    for (auto& p : refine_weak_points(spec, a.samples)) a.samples.push_back(std::move(p));
    a.geoms = analyze_boundary(spec, a.samples);

    for (const auto& g : a.geoms) {
        a.baseline_thresholds.push_back(point_threshold(g, spec.tolerances));
        if (g.levi.null_dim() > 0) {
            a.boas_straube_max_defect = std::max(a.boas_straube_max_defect, g.forms.hermitian_defect);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.forms.A, Eigen::EigenvaluesOnly);
            a.weak_min_eig_A = std::min(a.weak_min_eig_A, es.eigenvalues()(0));
        }
    }
    a.baseline = aggregate_indices(a.baseline_thresholds);

    const int budget = options.budget > 0 ? options.budget : spec.optimizer.budget;
    if (options.optimize && !spec.conformal_basis.empty()) {
        a.df_opt = optimize_trivialization(spec, a.geoms, Objective::DF, budget);
        a.s_opt = optimize_trivialization(spec, a.geoms, Objective::Steinness, budget);
    } else {
        const std::vector<double> zero(spec.conformal_basis.size(), 0.0);
        a.df_opt.coeffs = zero;
        a.df_opt.thresholds = a.baseline_thresholds;
        a.df_opt.summary = a.baseline;
        a.s_opt = a.df_opt;
    }
    a.per_point = a.df_opt.thresholds;
    for (std::size_t i = 0; i < a.per_point.size(); ++i) {
        a.per_point[i].gamma_s = a.s_opt.thresholds[i].gamma_s;
        a.per_point[i].s_strict_ok = a.s_opt.thresholds[i].s_strict_ok;
    }
    a.indices = a.df_opt.summary;
    a.indices.s_w = a.s_opt.summary.s_w;
    a.indices.s_s = a.s_opt.summary.s_s;

    if (options.oracles) {
        const OracleProbe inner(spec, a.samples, OracleSide::Interior);
        const OracleProbe outer(spec, a.samples, OracleSide::Exterior);
        if (inner.size() == 0 || outer.size() == 0) throw SamplingError("no off-boundary oracle points found");
        a.interior = oracle_exponent_search(inner, spec.oracle.interior);
        a.exterior = oracle_exponent_search(outer, spec.oracle.exterior);
        a.strong_oka_margin = inner.log_hessian_margin();

        // Necessity direction: an exponent certified off the boundary must be
        // admissible for eta_rho on the boundary.
        a.theorem1_ok = a.interior.exponent <= a.baseline.df_w + 2.0 * spec.oracle.interior.bisect_tol &&
                        a.baseline.s_w <= a.exterior.exponent + 2.0 * spec.oracle.exterior.bisect_tol;
        a.strong_oka_ok = !(a.strong_oka_margin > kStrongOkaSlack) || a.weak_min_eig_A >= a.strong_oka_margin - kStrongOkaSlack;
    }
    return a;
}

bool consistency_ok(const Analysis& a) {
    return a.theorem1_ok && a.strong_oka_ok && a.boas_straube_max_defect <= kHermitianDefectTol;
}

json manifest_json(const DomainSpec& spec, const std::string& config_path, double duration_s) {
    return {{"config_path", config_path},
            {"spec", json::parse(dump_domain_config(spec))},
            {"version", kToolVersion},
            {"duration_s", std::max(0.0, duration_s)},
            {"seed", spec.sampling.seed}};
}

json analysis_json(const Analysis& a, const std::string& config_path, double duration_s) {
    json indices = summary_json(a.indices);
    indices["trivialization_coeffs"] = a.df_opt.coeffs;
    indices["s_trivialization_coeffs"] = a.s_opt.coeffs;
    indices["pseudoconvex"] = true;
    indices["bounds"] = {{"df_w", "lower"}, {"df_s_lower", "lower"}, {"s_w", "upper"}, {"s_s_upper", "upper"}};
    indices["family"] = "e^u eta_rho, u in span(conformal_basis)";
    indices["n_samples"] = a.samples.size();
    indices["n_refined"] = a.samples.size() - static_cast<std::size_t>(a.n_uniform);

    json per_point = json::array();
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const PointThreshold& t = a.per_point[i];
        per_point.push_back({{"point", point_json(a.samples[i].p)},
                             {"null_dim", a.geoms[i].levi.null_dim()},
                             {"gamma_df", json_number(t.gamma_df)},
                             {"gamma_s", json_number(t.gamma_s)},
                             {"strict_flags", {{"df", t.df_strict_ok}, {"s", t.s_strict_ok}}},
                             {"marginal", t.marginal},
                             {"refined", static_cast<int>(i) >= a.n_uniform}});
    }

    return {{"manifest", manifest_json(a.spec, config_path, duration_s)},
            {"indices", indices},
            {"baseline", summary_json(a.baseline)},
            {"optimizer", {{"df_evaluations", a.df_opt.evaluations}, {"s_evaluations", a.s_opt.evaluations}}},
            {"per_point", per_point},
            {"oracles", oracles_json(a)},
            {"consistency", consistency_json(a)}};
}

json certify_json(const Analysis& a, const std::string& config_path, double duration_s) {
    return {{"manifest", manifest_json(a.spec, config_path, duration_s)},
            {"baseline", summary_json(a.baseline)},
            {"oracles", oracles_json(a)},
            {"consistency", consistency_json(a)},
            {"ok", consistency_ok(a)}};
}

json oracle_json(const OracleVerdict& v) {
    json by_distance = json::array();
    for (const auto& [d, m] : v.min_eig_by_distance) by_distance.push_back({{"distance", d}, {"min_eig", m}});
    json witnesses = json::array();
    for (const auto& w : v.witnesses)
        witnesses.push_back({{"point", point_json(w.q)}, {"distance", w.distance}, {"min_eig", w.min_eig}});
    return {{"gamma", v.gamma},
            {"side", side_name(v.side)},
            {"all_psd", v.all_psd},
            {"n_points", v.n_points},
            {"min_eig_by_distance", by_distance},
            {"witnesses", witnesses}};
}

json optimization_json(const OptimizationResult& r, Objective objective) {
    return {{"objective", objective == Objective::DF ? "df" : "s"},
            {"coeffs", r.coeffs},
            {"indices", summary_json(r.summary)},
            {"objective_value", json_number(r.objective)},
            {"evaluations", r.evaluations}};
}

std::string emit_pointwise_csv(const json& report) {
    const int n = report.at("manifest").at("spec").at("n").get<int>();
    std::ostringstream os;
    for (int j = 1; j <= n; ++j) os << "re_z" << j << ",im_z" << j << ',';
    os << "null_dim,gamma_df,gamma_s,marginal\n";
    for (const auto& row : report.at("per_point")) {
        for (const auto& c : row.at("point")) os << fmt(c.at(0).get<double>()) << ',' << fmt(c.at(1).get<double>()) << ',';
        os << row.at("null_dim").get<int>() << ',' << fmt(number_from(row.at("gamma_df"))) << ','
           << fmt(number_from(row.at("gamma_s"))) << ',' << (row.at("marginal").get<bool>() ? 1 : 0) << '\n';
    }
    return os.str();
}

}  // namespace cridx
