#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace cridx::detail {

struct SimplexOptions {
    int max_evals = 400;
    double step = 1.0;
    /// Stop once the best value is at or below this.
    double target = -std::numeric_limits<double>::infinity();
    double ftol = 1e-14;
    double xtol = 1e-12;
};

struct SimplexResult {
    Eigen::VectorXd x;
    double f = std::numeric_limits<double>::infinity();
    int evals = 0;
};

// Plain Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2).
// Non-finite objective values are treated as +inf.
inline SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn, const Eigen::VectorXd& x0,
                                 const SimplexOptions& opt) {
    const int k = static_cast<int>(x0.size());
    SimplexResult best;
    best.x = x0;
    auto eval = [&](const Eigen::VectorXd& x) {
        double f = fn(x);
        if (!std::isfinite(f)) f = std::numeric_limits<double>::infinity();
        ++best.evals;
        if (f < best.f) {
            best.f = f;
            best.x = x;
        }
        return f;
    };

    std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(k + 1), x0);
    std::vector<double> fs(static_cast<std::size_t>(k + 1));
    fs[0] = eval(x0);
    for (int i = 0; i < k && best.evals < opt.max_evals; ++i) {
        pts[static_cast<std::size_t>(i + 1)](i) += opt.step;
        fs[static_cast<std::size_t>(i + 1)] = eval(pts[static_cast<std::size_t>(i + 1)]);
    }
    if (k == 0) return best;

    std::vector<std::size_t> order(static_cast<std::size_t>(k + 1));
    while (best.evals < opt.max_evals && best.f > opt.target) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        const std::size_t lo = order.front();
        const std::size_t hi = order.back();
        const std::size_t second = order[order.size() - 2];

        double size = 0.0;
        for (const auto& p : pts) size = std::max(size, (p - pts[lo]).lpNorm<Eigen::Infinity>());
        if (size < opt.xtol || (std::isfinite(fs[hi]) && fs[hi] - fs[lo] < opt.ftol && size < 1e3 * opt.xtol)) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(k);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (i != hi) centroid += pts[i];
        centroid /= k;

        Eigen::VectorXd xr = centroid + (centroid - pts[hi]);
        const double fr = eval(xr);
        if (fr < fs[lo]) {
            Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[hi]);
            const double fe = eval(xe);
            if (fe < fr) {
                pts[hi] = xe;
                fs[hi] = fe;
            } else {
                pts[hi] = xr;
                fs[hi] = fr;
            }
            continue;
        }
        if (fr < fs[second]) {
            pts[hi] = xr;
            fs[hi] = fr;
            continue;
        }
        const bool outside = fr < fs[hi];
        Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                     : Eigen::VectorXd(centroid + 0.5 * (pts[hi] - centroid));
        const double fc = eval(xc);
        if (fc < (outside ? fr : fs[hi])) {
            pts[hi] = xc;
            fs[hi] = fc;
            continue;
        }
        for (std::size_t i = 0; i < pts.size() && best.evals < opt.max_evals; ++i) {
            if (i == lo) continue;
            pts[i] = pts[lo] + 0.5 * (pts[i] - pts[lo]);
            fs[i] = eval(pts[i]);
        }
    }
    return best;
}

}  // namespace cridx::detail
