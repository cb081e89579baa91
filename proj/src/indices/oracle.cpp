#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cridx/errors.hpp"
#include "cridx/indices.hpp"
#include "cridx/parallel.hpp"

namespace cridx {
namespace {

constexpr int kCoarseGrid = 17;
constexpr int kMaxScan = 4096;
constexpr std::size_t kMaxWitnesses = 5;

Eigen::VectorXd eigvals(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

OracleProbe::OracleProbe(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, OracleSide side)
    : side_(side), psd_tol_(spec.tolerances.psd_tol), distances_(spec.oracle.distances) {
    const int n = spec.n;
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const double sign = side == OracleSide::Interior ? -1.0 : 1.0;

    auto per_sample = parallel_map(samples, [&](const BoundaryPoint& bp) {
        std::vector<Point> pts;
        Eigen::VectorXcd nu(n);
        try {
            const WJet j1 = jet_lift_affine(spec.rho, bp.p, id, 1);
            for (int j = 0; j < n; ++j) nu(j) = j1.d(j1.zbar(j));
        } catch (const Error&) {
            return pts;
        }
        const double norm = nu.norm();
        if (!(norm > 0.0)) return pts;
        nu /= norm;
        for (double d : distances_) {
            Point pt;
            pt.distance = d;
            pt.q = bp.p;
            for (int j = 0; j < n; ++j) pt.q[static_cast<std::size_t>(j)] += sign * d * nu(j);
            try {
                const WJet jet = jet_lift_affine(spec.rho, pt.q, id, 2);
                pt.rho = jet.value().real();
                pt.d.resize(n);
                pt.h.resize(n, n);
                for (int j = 0; j < n; ++j) {
                    pt.d(j) = jet.d(WJet::z(j));
                    for (int k = 0; k < n; ++k) pt.h(j, k) = jet.d(WJet::z(j), jet.zbar(k));
                }
            } catch (const Error&) {
                continue;
            }
            if (sign * pt.rho <= 0.0 || !std::isfinite(pt.rho)) continue;
            pts.push_back(std::move(pt));
        }
        return pts;
    });
    for (auto& v : per_sample)
        for (auto& p : v) points_.push_back(std::move(p));
}

double OracleProbe::min_eig(const Point& pt, double gamma, bool& ok) const {
    // Hessian divided by gamma |rho|^(gamma-1):
    //   interior  rho_jk + (1 - gamma) rho_j rho_kbar / (-rho)
    //   exterior  rho_jk + (gamma - 1) rho_j rho_kbar / rho
    const double coeff = side_ == OracleSide::Interior ? (1.0 - gamma) / (-pt.rho) : (gamma - 1.0) / pt.rho;
    const Eigen::MatrixXcd m = pt.h + coeff * pt.d * pt.d.adjoint();
    const Eigen::VectorXd eig = eigvals(m);
    const double scale = std::max(std::abs(eig(0)), std::abs(eig(eig.size() - 1)));
    ok = eig(0) >= -psd_tol_ * scale;
    return eig(0);
}

OracleVerdict OracleProbe::evaluate(double gamma) const {
    OracleVerdict out;
    out.gamma = gamma;
    out.side = side_;
    out.n_points = size();
    struct Eval {
        double eig;
        bool ok;
    };
    const auto evals = parallel_map(points_, [&](const Point& pt) {
        Eval e{};
        e.eig = min_eig(pt, gamma, e.ok);
        return e;
    });
    for (double d : distances_) out.min_eig_by_distance.emplace_back(d, kInf);
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Point& pt = points_[i];
        for (auto& [d, m] : out.min_eig_by_distance)
            if (d == pt.distance) m = std::min(m, evals[i].eig);
        if (!evals[i].ok) {
            out.all_psd = false;
            if (out.witnesses.size() < kMaxWitnesses) out.witnesses.push_back({pt.q, pt.distance, evals[i].eig});
        }
    }
    // Distances without any admissible point are dropped so every entry is finite.
    std::erase_if(out.min_eig_by_distance, [](const auto& e) { return std::isinf(e.second); });
    return out;
}

bool OracleProbe::all_psd(double gamma) const {
    const auto oks = parallel_map(points_, [&](const Point& pt) {
        bool ok = true;
        min_eig(pt, gamma, ok);
        return ok ? 1 : 0;
    });
    return std::all_of(oks.begin(), oks.end(), [](int ok) { return ok == 1; });
}

double OracleProbe::log_hessian_margin() const {
    if (side_ != OracleSide::Interior) throw PreconditionError("log_hessian_margin needs an interior probe");
    const auto mins = parallel_map(points_, [&](const Point& pt) {
        const Eigen::MatrixXcd m = pt.h / (-pt.rho) + pt.d * pt.d.adjoint() / (pt.rho * pt.rho);
        return eigvals(m)(0);
    });
    double out = kInf;
    for (double m : mins) out = std::min(out, m);
    return out;
}

namespace {

void check_gamma(OracleSide side, double gamma) {
    if (side == OracleSide::Interior && !(gamma > 0.0 && gamma < 1.0))
        throw PreconditionError("interior oracle needs 0 < gamma < 1");
    if (side == OracleSide::Exterior && !(gamma > 1.0 && std::isfinite(gamma)))
        throw PreconditionError("exterior oracle needs gamma > 1");
}

OracleVerdict run_oracle(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double gamma,
                         OracleSide side) {
    check_gamma(side, gamma);
    OracleProbe probe(spec, samples, side);
    if (probe.size() == 0) {
        throw SamplingError(std::string("no ") + (side == OracleSide::Interior ? "interior" : "exterior") +
                            " oracle points found");
    }
    return probe.evaluate(gamma);
}

}  // namespace

OracleVerdict interior_psh_oracle(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double gamma) {
    return run_oracle(spec, samples, gamma, OracleSide::Interior);
}

OracleVerdict exterior_psh_oracle(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples, double gamma) {
    return run_oracle(spec, samples, gamma, OracleSide::Exterior);
}

ExponentSearch oracle_exponent_search(const OracleProbe& probe, const GammaGrid& grid) {
    // The predicate holds on [.., x] (interior) or [x, ..] (exterior).
    const bool interior = probe.side() == OracleSide::Interior;
    ExponentSearch out;
    auto pred = [&](double g) {
        ++out.evaluations;
        return probe.all_psd(g);
    };
    // Phrase both sides as "good below x" by flipping the exterior predicate.
    auto good = [&](double g) { return interior ? pred(g) : !pred(g); };

    std::vector<double> xs(kCoarseGrid);
    std::vector<bool> ok(kCoarseGrid);
    for (int i = 0; i < kCoarseGrid; ++i) {
        xs[static_cast<std::size_t>(i)] = grid.lo + (grid.hi - grid.lo) * i / (kCoarseGrid - 1);
        ok[static_cast<std::size_t>(i)] = good(xs[static_cast<std::size_t>(i)]);
    }
    int switches = 0;
    for (int i = 1; i < kCoarseGrid; ++i)
        if (ok[static_cast<std::size_t>(i)] != ok[static_cast<std::size_t>(i - 1)]) ++switches;
    const bool monotone = switches == 0 || (switches == 1 && ok.front());
    const double none = interior ? 0.0 : kInf;

    if (monotone) {
        if (ok.back()) {
            out.exponent = interior ? grid.hi : none;
            return out;
        }
        if (!ok.front()) {
            out.exponent = interior ? none : grid.lo;
            return out;
        }
        std::size_t i = 0;
        while (ok[i + 1]) ++i;
        double lo = xs[i];
        double hi = xs[i + 1];
        while (hi - lo > grid.bisect_tol) {
            const double mid = 0.5 * (lo + hi);
            (good(mid) ? lo : hi) = mid;
        }
        // Report the end of the bracket where rho's condition holds.
        out.exponent = interior ? lo : hi;
        return out;
    }

    out.monotone = false;
    const int steps = std::min(kMaxScan, static_cast<int>(std::ceil((grid.hi - grid.lo) / grid.bisect_tol)));
    const double h = (grid.hi - grid.lo) / steps;
    if (interior) {
        out.exponent = none;
        for (int i = 0; i <= steps; ++i) {
            const double g = grid.lo + h * i;
            if (!pred(g)) break;
            out.exponent = g;
        }
    } else {
        out.exponent = none;
        for (int i = steps; i >= 0; --i) {
            const double g = grid.lo + h * i;
            if (!pred(g)) break;
            out.exponent = g;
        }
    }
    return out;
}

ExponentSearch oracle_exponent_search(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples,
                                      OracleSide side) {
    OracleProbe probe(spec, samples, side);
    if (probe.size() == 0) throw SamplingError("no oracle points found");
    return oracle_exponent_search(probe, side == OracleSide::Interior ? spec.oracle.interior : spec.oracle.exterior);
}

double strong_oka_margin(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
    OracleProbe probe(spec, samples, OracleSide::Interior);
    if (probe.size() == 0) throw SamplingError("no interior points for the strong Oka margin");
    return probe.log_hessian_margin();
}

}  // namespace cridx
