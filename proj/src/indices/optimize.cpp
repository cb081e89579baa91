#include <algorithm>
#include <cmath>
#include <random>

#include "cridx/errors.hpp"
#include "cridx/indices.hpp"
#include "cridx/parallel.hpp"
#include "../nelder_mead.hpp"

namespace cridx {
namespace {

// Finite stand-in for gamma_s = inf so the simplex search can compare.
constexpr double kSteinnessCap = 1e6;
constexpr std::uint64_t kOptimizerSeedMix = 0x9e3779b97f4a7c15ULL;

}  // namespace

std::vector<ConformalModel> build_conformal_models(const DomainSpec& spec, const std::vector<PointGeometry>& geoms) {
    std::vector<std::size_t> weak;
    for (std::size_t i = 0; i < geoms.size(); ++i)
        if (geoms[i].levi.null_dim() > 0) weak.push_back(i);

    return parallel_map(weak, [&](std::size_t i) {
        const PointGeometry& g = geoms[i];
        ConformalModel m;
        m.sample_index = i;
        m.base = g.forms;
        m.marginal = g.levi.marginal;
        m.null_dim = g.levi.null_dim();
        const Eigen::MatrixXcd& nb = g.levi.null_basis;
        for (const Expr& u : spec.conformal_basis) {
            const WJet uj = jet_lift_affine(u, g.point.p, g.frame.U, 2);
            m.dv.push_back(nb.transpose() * tangential_gradient(uj));
            const Eigen::MatrixXcd h = nb.transpose() * tangential_hessian(uj) * nb.conjugate();
            m.dA.push_back(-0.5 * (h + h.adjoint()));
        }
        return m;
    });
}

FormPair apply_coefficients(const ConformalModel& m, std::span<const double> coeffs) {
    if (coeffs.size() != m.dv.size()) throw PreconditionError("coefficient count does not match the basis");
    FormPair fp = m.base;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        fp.v += coeffs[i] * m.dv[i];
        fp.A += coeffs[i] * m.dA[i];
    }
    return fp;
}

namespace {

std::vector<PointThreshold> model_thresholds(const std::vector<ConformalModel>& models, std::span<const double> coeffs,
                                             const Tolerances& tol) {
    std::vector<PointThreshold> out;
    out.reserve(models.size());
    for (const auto& m : models) {
        PointThreshold t = point_threshold(apply_coefficients(m, coeffs), tol);
        t.marginal = m.marginal;
        out.push_back(t);
    }
    return out;
}

}  // namespace

double trivialization_objective(const std::vector<ConformalModel>& models, std::span<const double> coeffs,
                                const Tolerances& tol, Objective objective) {
    const auto ts = model_thresholds(models, coeffs, tol);
    const IndexSummary s = aggregate_indices(ts);
    if (ts.empty()) return objective == Objective::DF ? -1.0 : 1.0;
    double strict = 0.0;
    for (const auto& t : ts) strict += (objective == Objective::DF ? t.df_strict_ok : t.s_strict_ok) ? 1.0 : 0.0;
    strict /= static_cast<double>(ts.size());
    if (objective == Objective::DF) return -(s.df_w + tol.strict_margin * strict);
    return std::min(s.s_w, kSteinnessCap) - tol.strict_margin * strict;
}

OptimizationResult evaluate_trivialization(const DomainSpec& spec, const std::vector<PointGeometry>& geoms,
                                           std::span<const double> coeffs) {
    if (coeffs.size() != spec.conformal_basis.size()) throw PreconditionError("coefficient count does not match the basis");
    const auto models = build_conformal_models(spec, geoms);
    const auto weak = model_thresholds(models, coeffs, spec.tolerances);
    OptimizationResult out;
    out.coeffs.assign(coeffs.begin(), coeffs.end());
    out.thresholds.resize(geoms.size());
    for (std::size_t i = 0; i < geoms.size(); ++i) out.thresholds[i].marginal = geoms[i].levi.marginal;
    for (std::size_t k = 0; k < models.size(); ++k) out.thresholds[models[k].sample_index] = weak[k];
    out.summary = aggregate_indices(out.thresholds);
    return out;
}

OptimizationResult optimize_trivialization(const DomainSpec& spec, const std::vector<PointGeometry>& geoms,
                                           Objective objective, int budget) {
    if (budget < 1) throw PreconditionError("optimizer budget must be at least 1");
    const int k = static_cast<int>(spec.conformal_basis.size());
    const auto models = build_conformal_models(spec, geoms);
    const auto f = [&](const Eigen::VectorXd& x) {
        return trivialization_objective(models, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                                        spec.tolerances, objective);
    };

    Eigen::VectorXd best = Eigen::VectorXd::Zero(k);
    double best_f = f(best);
    int evals = 1;

    if (k > 0 && !models.empty()) {
        std::mt19937_64 rng(spec.sampling.seed ^ kOptimizerSeedMix);
        std::uniform_real_distribution<double> unif(-2.0, 2.0);
        const int restarts = spec.optimizer.restarts;
        const int per_restart = std::max(1, (budget - 1) / restarts);
        for (int r = 0; r < restarts && evals < budget; ++r) {
            Eigen::VectorXd x0 = Eigen::VectorXd::Zero(k);
            if (r > 0)
                for (int i = 0; i < k; ++i) x0(i) = unif(rng);
            detail::SimplexOptions opt;
            opt.max_evals = std::min(per_restart, budget - evals);
            opt.step = 1.0;
            const auto res = detail::nelder_mead(f, x0, opt);
            evals += res.evals;
            if (res.f < best_f) {
                best_f = res.f;
                best = res.x;
            }
        }
    }

    OptimizationResult out =
        evaluate_trivialization(spec, geoms, std::span<const double>(best.data(), static_cast<std::size_t>(k)));
    out.objective = best_f;
    out.evaluations = evals;
    return out;
}

}  // namespace cridx
