#include "cridx/validation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "cridx/errors.hpp"
#include "cridx/indices.hpp"
#include "cridx/wjet.hpp"

namespace cridx::validation {
namespace {

cplx nested_difference(const Expr& expr, std::vector<cplx>& p, const std::vector<int>& vars, std::size_t k, double h) {
    if (k == vars.size()) return eval_complex(expr, p);
    const int n = expr.dimension();
    const int v = vars[k];
    const bool holo = v < n;
    const std::size_t j = static_cast<std::size_t>(holo ? v : v - n);
    const cplx saved = p[j];

    p[j] = saved + h;
    const cplx fx_plus = nested_difference(expr, p, vars, k + 1, h);
    p[j] = saved - h;
    const cplx fx_minus = nested_difference(expr, p, vars, k + 1, h);
    p[j] = saved + cplx(0.0, h);
    const cplx fy_plus = nested_difference(expr, p, vars, k + 1, h);
    p[j] = saved - cplx(0.0, h);
    const cplx fy_minus = nested_difference(expr, p, vars, k + 1, h);
    p[j] = saved;

    const cplx dx = (fx_plus - fx_minus) / (2.0 * h);
    const cplx dy = (fy_plus - fy_minus) / (2.0 * h);
    const cplx i(0.0, 1.0);
    // d/dz = (d/dx - i d/dy) / 2,  d/dzbar = (d/dx + i d/dy) / 2
    return 0.5 * (holo ? dx - i * dy : dx + i * dy);
}

double min_eig(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

std::string coord(std::mt19937_64& rng, int n) {
    return "z" + std::to_string(std::uniform_int_distribution<int>(1, n)(rng));
}

std::string constant(std::mt19937_64& rng) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << std::uniform_real_distribution<double>(0.1, 1.5)(rng);
    return os.str();
}

std::string real_atom(std::mt19937_64& rng, int n) {
    switch (std::uniform_int_distribution<int>(0, 6)(rng)) {
        case 0: return "re(" + coord(rng, n) + ")";
        case 1: return "im(" + coord(rng, n) + ")";
        case 2: return "abs2(" + coord(rng, n) + ")";
        case 3: return "re(" + coord(rng, n) + "*" + coord(rng, n) + ")";
        case 4: return "im(" + coord(rng, n) + "*conj(" + coord(rng, n) + "))";
        case 5: return "abs2(" + coord(rng, n) + "*" + coord(rng, n) + " - " + constant(rng) + ")";
        default: return constant(rng);
    }
}

std::string real_expr(std::mt19937_64& rng, int n, int depth) {
    if (depth <= 0) return real_atom(rng, n);
    const auto sub = [&] { return real_expr(rng, n, depth - 1); };
    switch (std::uniform_int_distribution<int>(0, 11)(rng)) {
        case 0: return "(" + sub() + " + " + sub() + ")";
        case 1: return "(" + sub() + " - " + sub() + ")";
        case 2: return "(" + sub() + " * " + sub() + ")";
        case 3: return "exp(0.5*" + sub() + ")";
        case 4: return "sin(" + sub() + ")";
        case 5: return "cos(" + sub() + ")";
        case 6: return "sqrt(1.5 + (" + sub() + ")^2)";
        case 7: return "log(1.2 + (" + sub() + ")^2)";
        case 8: return "(" + sub() + ")^" + std::to_string(std::uniform_int_distribution<int>(2, 3)(rng));
        case 9: return "(" + sub() + ") / (1 + abs2(" + coord(rng, n) + "))";
        case 10: return "abs2(" + coord(rng, n) + "^2 + " + constant(rng) + "*" + coord(rng, n) + ")";
        default: return real_atom(rng, n);
    }
}

}  // namespace

cplx fd_wirtinger(const Expr& expr, const std::vector<cplx>& point, const std::vector<int>& vars, double h) {
    if (vars.size() > 3) throw PreconditionError("fd_wirtinger: at most three variables");
    std::vector<cplx> p = point;
    const cplx d1 = nested_difference(expr, p, vars, 0, h);
    if (vars.empty()) return d1;
    const cplx d2 = nested_difference(expr, p, vars, 0, 2.0 * h);
    return (4.0 * d1 - d2) / 3.0;
}

std::string random_real_expression(std::mt19937_64& rng, int n, int depth) { return real_expr(rng, n, depth); }

double brute_force_rank_one(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& v, double abs_tol, double t_cap) {
    const Eigen::MatrixXcd vv = v * v.adjoint();
    const auto feasible = [&](double t) { return min_eig(A - t * vv) >= -abs_tol; };
    if (!feasible(0.0)) return -1.0;
    if (feasible(t_cap)) return kInf;
    // The feasible set is an interval [0, t*]: scan geometrically, then bisect.
    double lo = 0.0;
    double hi = t_cap;
    constexpr int kScan = 400;
    const double t_min = 1e-9;
    for (int i = 0; i <= kScan; ++i) {
        const double t = t_min * std::pow(t_cap / t_min, static_cast<double>(i) / kScan);
        if (!feasible(t)) {
            hi = t;
            break;
        }
        lo = t;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss;
    Eigen::MatrixXcd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = cplx(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

SuiteResult jet_fd_suite(std::uint64_t seed, int count, double rel_tol) {
    SuiteResult res;
    res.name = "jet finite differences";
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> box(-1.0, 1.0);
    while (res.cases < count) {
        const int n = std::uniform_int_distribution<int>(2, 3)(rng);
        const std::string text = random_real_expression(rng, n, 3);
        std::vector<cplx> p(static_cast<std::size_t>(n));
        for (auto& c : p) {
            const double re = box(rng);
            const double im = box(rng);
            c = cplx(re, im);
        }
        const int order = std::uniform_int_distribution<int>(0, 3)(rng);
        std::vector<int> vars(static_cast<std::size_t>(order));
        for (auto& v : vars) v = std::uniform_int_distribution<int>(0, 2 * n - 1)(rng);

        Expr e;
        WJet jet;
        try {
            e = parse_defining_function(text, n);
            jet = jet_lift(e, p, 3);
        } catch (const DomainError&) {
            continue;  // undefined at this point; draw again
        }
        MultiIndex a(static_cast<std::size_t>(n), 0), b(static_cast<std::size_t>(n), 0);
        for (int v : vars) (v < n ? a[static_cast<std::size_t>(v)] : b[static_cast<std::size_t>(v - n)]) += 1;
        const cplx exact = jet_derivative(jet, a, b);
        const cplx fd = fd_wirtinger(e, p, vars);
        const double err = std::abs(exact - fd) / std::max(1.0, std::abs(exact));
        ++res.cases;
        res.worst_aux = std::max(res.worst_aux, reality_defect(jet));
        if (err > res.worst) {
            res.worst = err;
            res.worst_case = text;
        }
        if (!(err <= rel_tol)) ++res.failures;
    }
    if (res.worst_aux > 1e-10) ++res.failures;
    return res;
}

SuiteResult rank_one_suite(std::uint64_t seed, int count, double rel_tol) {
    SuiteResult res;
    res.name = "rank-one threshold";
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    constexpr double kPsdTol = 1e-9;
    while (res.cases < count) {
        const int r = std::uniform_int_distribution<int>(1, 4)(rng);
        // A = B B^* with B of rank k <= r; v is drawn from the range of B
        // when A is singular, otherwise anywhere.
        const int k = std::uniform_int_distribution<int>(0, 3)(rng) == 0 ? std::uniform_int_distribution<int>(1, r)(rng) : r;
        Eigen::MatrixXcd b(r, k);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < k; ++j) b(i, j) = cplx(gauss(rng), gauss(rng));
        const Eigen::MatrixXcd a = b * b.adjoint();
        Eigen::VectorXcd y(k);
        for (int j = 0; j < k; ++j) y(j) = cplx(gauss(rng), gauss(rng));
        const Eigen::VectorXcd v = b * y;

        const RankOne fast = rank_one_threshold(a, v, kPsdTol);
        const double brute = brute_force_rank_one(a, v, 1e-12 * std::max(1.0, a.norm()));
        if (std::isinf(brute)) continue;  // beyond the scan range
        ++res.cases;
        const double err = std::abs(fast.t_max - brute) / std::max(std::abs(brute), 1e-300);
        if (err > res.worst) {
            res.worst = err;
            std::ostringstream os;
            os << "r=" << r << " rank=" << k << " fast=" << fast.t_max << " brute=" << brute;
            res.worst_case = os.str();
        }
        if (!(err <= rel_tol)) ++res.failures;
    }
    return res;
}

}  // namespace cridx::validation
