#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <limits>
#include <random>
#include <string>

#include "cridx/crgeom.hpp"
#include "cridx/errors.hpp"
#include "cridx/parallel.hpp"
#include "../nelder_mead.hpp"

namespace cridx {
namespace {

constexpr double kDedupDistance = 1e-6;

double distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

bool is_new(const std::vector<cplx>& p, const std::vector<BoundaryPoint>& a, const std::vector<BoundaryPoint>& b = {}) {
    for (const auto& x : a)
        if (distance(p, x.p) < kDedupDistance) return false;
    for (const auto& x : b)
        if (distance(p, x.p) < kDedupDistance) return false;
    return true;
}

bool inside_box(const std::vector<cplx>& p, double r) {
    return std::all_of(p.begin(), p.end(), [r](cplx c) { return std::abs(c.real()) <= r && std::abs(c.imag()) <= r; });
}

// Projection that also rejects boundary points outside the sampling box.
std::optional<BoundaryPoint> try_project(const DomainSpec& spec, const std::vector<cplx>& q) {
    try {
        BoundaryPoint p = project_to_boundary(spec, q);
        if (!inside_box(p.p, spec.sampling.box_radius)) return std::nullopt;
        return p;
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<cplx> from_real(const Eigen::VectorXd& x) {
    std::vector<cplx> q(static_cast<std::size_t>(x.size() / 2));
    for (std::size_t j = 0; j < q.size(); ++j) q[j] = cplx(x(2 * static_cast<Eigen::Index>(j)), x(2 * static_cast<Eigen::Index>(j) + 1));
    return q;
}

Eigen::VectorXd to_real(const std::vector<cplx>& q) {
    Eigen::VectorXd x(2 * static_cast<Eigen::Index>(q.size()));
    for (std::size_t j = 0; j < q.size(); ++j) {
        x(2 * static_cast<Eigen::Index>(j)) = q[j].real();
        x(2 * static_cast<Eigen::Index>(j) + 1) = q[j].imag();
    }
    return x;
}

}  // namespace

BoundaryPoint project_to_boundary(const DomainSpec& spec, std::span<const cplx> q0) {
    const int n = spec.n;
    if (static_cast<int>(q0.size()) != n) throw PreconditionError("project_to_boundary: point dimension mismatch");
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    std::vector<cplx> q(q0.begin(), q0.end());
    for (int iter = 0; iter <= spec.sampling.max_newton_iters; ++iter) {
        const WJet jet = jet_lift_affine(spec.rho, q, id, 1);
        const double rho = jet.value().real();
        // Real gradient in complex form: d/dx + i d/dy = 2 d/dzbar.
        double g2 = 0.0;
        for (int j = 0; j < n; ++j) g2 += std::norm(2.0 * jet.d(jet.zbar(j)));
        const double grad_norm = 0.5 * std::sqrt(g2);
        if (!std::isfinite(rho) || !std::isfinite(g2)) throw ProjectionError("projection diverged");
        if (std::abs(rho) <= spec.sampling.newton_tol) {
            if (!(grad_norm > 0.0)) throw ProjectionError("gradient of rho vanishes on the boundary");
            return BoundaryPoint{q, grad_norm};
        }
        if (iter == spec.sampling.max_newton_iters) break;
        if (!(grad_norm > 1e-14)) throw ProjectionError("gradient of rho vanishes along the projection path");
        for (int j = 0; j < n; ++j) q[static_cast<std::size_t>(j)] -= rho * 2.0 * jet.d(jet.zbar(j)) / g2;
    }
    throw ProjectionError("projection did not converge in " + std::to_string(spec.sampling.max_newton_iters) +
                          " Newton steps");
}

std::vector<BoundaryPoint> sample_boundary(const DomainSpec& spec) {
    const int n = spec.n;
    const int count = spec.sampling.count;
    const double r = spec.sampling.box_radius;
    std::mt19937_64 rng(spec.sampling.seed);
    std::uniform_real_distribution<double> unif(-r, r);

    std::vector<BoundaryPoint> out;
    constexpr int kRounds = 16;
    for (int round = 0; round < kRounds && static_cast<int>(out.size()) < count; ++round) {
        std::vector<std::vector<cplx>> starts(static_cast<std::size_t>(count));
        for (auto& s : starts) {
            s.resize(static_cast<std::size_t>(n));
            for (auto& c : s) {
                const double re = unif(rng);
                const double im = unif(rng);
                c = cplx(re, im);
            }
        }
        auto projected = parallel_map(starts, [&](const std::vector<cplx>& q) { return try_project(spec, q); });
        for (auto& p : projected) {
            if (static_cast<int>(out.size()) >= count) break;
            if (p && is_new(p->p, out)) out.push_back(std::move(*p));
        }
    }
    if (static_cast<int>(out.size()) * 4 < count) {
        throw SamplingError("only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                            " boundary points found in the sampling box; check rho and sampling.box_radius");
    }
    return out;
}

double levi_weakness(const DomainSpec& spec, const BoundaryPoint& p) {
    const LeviData levi = levi_data(spec, p, adapted_frame(spec, p));
    return levi.eigvals(0) / std::max(levi.grad_norm, levi.eigvals(levi.eigvals.size() - 1));
}

std::vector<BoundaryPoint> refine_weak_points(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
    const int budget = spec.sampling.weak_refine;
    if (budget <= 0 || samples.empty()) return {};
    const double cut = spec.tolerances.null_eig_rel_tol;

    const auto weakness = parallel_map(samples, [&](const BoundaryPoint& p) {
        try {
            return levi_weakness(spec, p);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    });
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weakness[a] < weakness[b]; });

    std::vector<std::size_t> starts;
    for (std::size_t i : order) {
        if (static_cast<int>(starts.size()) >= budget) break;
        if (weakness[i] > cut && std::isfinite(weakness[i])) starts.push_back(i);
    }

    const auto objective = [&](const Eigen::VectorXd& x) {
        const auto p = try_project(spec, from_real(x));
        if (!p) return std::numeric_limits<double>::infinity();
        try {
            return levi_weakness(spec, *p);
        } catch (const Error&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    detail::SimplexOptions opt;
    opt.max_evals = 600;
    opt.step = 0.1;
    opt.target = 1e-3 * cut;
    const auto found = parallel_map(starts, [&](std::size_t i) -> std::optional<BoundaryPoint> {
        const auto res = detail::nelder_mead(objective, to_real(samples[i].p), opt);
        if (!(res.f <= cut)) return std::nullopt;
        return try_project(spec, from_real(res.x));
    });

    std::vector<BoundaryPoint> out;
    for (const auto& p : found)
        if (p && is_new(p->p, samples, out)) out.push_back(*p);
    return out;
}

}  // namespace cridx
