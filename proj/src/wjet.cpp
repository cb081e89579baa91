#include "cridx/wjet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/LU>

#include "cridx/errors.hpp"
#include "detail.hpp"

namespace cridx {
namespace {

std::size_t jet_size(int n, int order) {
    const std::size_t m = static_cast<std::size_t>(2 * n);
    std::size_t size = 1;
    if (order >= 1) size += m;
    if (order >= 2) size += m * m;
    if (order >= 3) size += m * m * m;
    return size;
}

// Univariate Taylor table phi(x0), phi'(x0), phi''(x0), phi'''(x0).
using Table = std::array<cplx, 4>;

WJet compose(const WJet& f, const Table& phi) {
    const int m = f.num_vars();
    const int order = f.order();
    WJet h(f.dimension(), order);
    h.value() = phi[0];
    if (order >= 1) {
        for (int a = 0; a < m; ++a) h.raw()[h.idx1(a)] = phi[1] * f.d(a);
    }
    if (order >= 2) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                h.raw()[h.idx2(a, b)] = phi[2] * f.d(a) * f.d(b) + phi[1] * f.d(a, b);
    }
    if (order >= 3) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    h.raw()[h.idx3(a, b, c)] =
                        phi[3] * f.d(a) * f.d(b) * f.d(c) +
                        phi[2] * (f.d(a, b) * f.d(c) + f.d(a, c) * f.d(b) + f.d(b, c) * f.d(a)) +
                        phi[1] * f.d(a, b, c);
    }
    return h;
}

WJet multiply(const WJet& f, const WJet& g) {
    const int m = f.num_vars();
    const int order = f.order();
    WJet h(f.dimension(), order);
    const cplx f0 = f.value();
    const cplx g0 = g.value();
    h.value() = f0 * g0;
    if (order >= 1) {
        for (int a = 0; a < m; ++a) h.raw()[h.idx1(a)] = f.d(a) * g0 + f0 * g.d(a);
    }
    if (order >= 2) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                h.raw()[h.idx2(a, b)] = f.d(a, b) * g0 + f.d(a) * g.d(b) + f.d(b) * g.d(a) + f0 * g.d(a, b);
    }
    if (order >= 3) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    h.raw()[h.idx3(a, b, c)] = f.d(a, b, c) * g0 + f.d(a, b) * g.d(c) + f.d(a, c) * g.d(b) +
                                               f.d(b, c) * g.d(a) + f.d(a) * g.d(b, c) + f.d(b) * g.d(a, c) +
                                               f.d(c) * g.d(a, b) + f0 * g.d(a, b, c);
    }
    return h;
}

WJet conjugate(const WJet& f) {
    const int m = f.num_vars();
    const int order = f.order();
    WJet h(f.dimension(), order);
    h.value() = std::conj(f.value());
    if (order >= 1) {
        for (int a = 0; a < m; ++a) h.raw()[h.idx1(a)] = std::conj(f.d(f.conj_var(a)));
    }
    if (order >= 2) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) h.raw()[h.idx2(a, b)] = std::conj(f.d(f.conj_var(a), f.conj_var(b)));
    }
    if (order >= 3) {
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    h.raw()[h.idx3(a, b, c)] = std::conj(f.d(f.conj_var(a), f.conj_var(b), f.conj_var(c)));
    }
    return h;
}

cplx ipow(cplx x, int e) {
    if (e < 0) {
        detail::check_nonzero_divisor(x);
        x = 1.0 / x;
        e = -e;
    }
    cplx r = 1.0;
    for (int i = 0; i < e; ++i) r *= x;
    return r;
}

Table power_table(cplx x, int k) {
    Table t{};
    t[0] = ipow(x, k);
    double coeff = 1.0;
    for (int j = 1; j <= 3; ++j) {
        coeff *= static_cast<double>(k - j + 1);
        t[static_cast<std::size_t>(j)] = coeff == 0.0 ? cplx(0.0) : coeff * ipow(x, k - j);
    }
    return t;
}

class Lifter {
public:
    Lifter(std::span<const cplx> point, const Eigen::MatrixXcd& frame, int order)
        : point_(point), frame_(frame), order_(order), n_(static_cast<int>(point.size())) {}

    WJet lift(const ExprNode& node) const {
        switch (node.kind) {
            case NodeKind::Constant: {
                WJet h(n_, order_);
                h.value() = node.value;
                return h;
            }
            case NodeKind::Coord: {
                WJet h(n_, order_);
                h.value() = point_[static_cast<std::size_t>(node.index)];
                if (order_ >= 1) {
                    for (int a = 0; a < n_; ++a) h.raw()[h.idx1(WJet::z(a))] = frame_(node.index, a);
                }
                return h;
            }
            case NodeKind::Conj: return conjugate(lift(*node.args[0]));
            case NodeKind::Re: {
                WJet f = lift(*node.args[0]);
                return axpby(0.5, f, 0.5, conjugate(f));
            }
            case NodeKind::Im: {
                WJet f = lift(*node.args[0]);
                const cplx half_over_i(0.0, -0.5);
                return axpby(half_over_i, f, -half_over_i, conjugate(f));
            }
            case NodeKind::Abs2: {
                WJet f = lift(*node.args[0]);
                return multiply(f, conjugate(f));
            }
            case NodeKind::Neg: {
                WJet f = lift(*node.args[0]);
                return axpby(-1.0, f, 0.0, f);
            }
            case NodeKind::Add: return axpby(1.0, lift(*node.args[0]), 1.0, lift(*node.args[1]));
            case NodeKind::Sub: return axpby(1.0, lift(*node.args[0]), -1.0, lift(*node.args[1]));
            case NodeKind::Mul: return multiply(lift(*node.args[0]), lift(*node.args[1]));
            case NodeKind::Div: {
                WJet num = lift(*node.args[0]);
                WJet den = lift(*node.args[1]);
                const cplx x = den.value();
                detail::check_nonzero_divisor(x);
                const cplx r = 1.0 / x;
                return multiply(num, compose(den, {r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r}));
            }
            case NodeKind::Pow: {
                WJet f = lift(*node.args[0]);
                return compose(f, power_table(f.value(), node.exponent));
            }
            case NodeKind::Exp: {
                WJet f = lift(*node.args[0]);
                const cplx e = std::exp(f.value());
                return compose(f, {e, e, e, e});
            }
            case NodeKind::Log: {
                WJet f = lift(*node.args[0]);
                const double x = detail::positive_real_argument(f.value(), "log");
                const double r = 1.0 / x;
                return compose(f, {std::log(x), r, -r * r, 2.0 * r * r * r});
            }
            case NodeKind::Sin: {
                WJet f = lift(*node.args[0]);
                const cplx s = std::sin(f.value());
                const cplx c = std::cos(f.value());
                return compose(f, {s, c, -s, -c});
            }
            case NodeKind::Cos: {
                WJet f = lift(*node.args[0]);
                const cplx s = std::sin(f.value());
                const cplx c = std::cos(f.value());
                return compose(f, {c, -s, -c, s});
            }
            case NodeKind::Sqrt: {
                WJet f = lift(*node.args[0]);
                const double x = detail::positive_real_argument(f.value(), "sqrt");
                const double s = std::sqrt(x);
                return compose(f, {s, 0.5 / s, -0.25 / (s * x), 0.375 / (s * x * x)});
            }
        }
        throw Error("corrupt expression node");
    }

private:
    std::span<const cplx> point_;
    const Eigen::MatrixXcd& frame_;
    int order_;
    int n_;
};

}  // namespace

WJet::WJet(int n, int order) : n_(n), order_(order), data_(jet_size(n, order), cplx(0.0)) {}

void WJet::set(int a, cplx v) { data_[idx1(a)] = v; }

void WJet::set(int a, int b, cplx v) {
    data_[idx2(a, b)] = v;
    data_[idx2(b, a)] = v;
}

void WJet::set(int a, int b, int c, cplx v) {
    std::array<int, 3> p{a, b, c};
    std::sort(p.begin(), p.end());
    do {
        data_[idx3(p[0], p[1], p[2])] = v;
    } while (std::next_permutation(p.begin(), p.end()));
}

WJet jet_lift_affine(const Expr& ast, std::span<const cplx> point, const Eigen::MatrixXcd& frame, int order) {
    if (order < 0 || order > 3) throw PreconditionError("jet order must be in 0..3");
    const int n = ast.dimension();
    if (static_cast<int>(point.size()) != n) throw PreconditionError("point dimension does not match expression");
    if (frame.rows() != n || frame.cols() != n) throw PreconditionError("frame must be n x n");
    WJet jet = Lifter(point, frame, order).lift(ast.root());
    jet.set_base_point(std::vector<cplx>(point.begin(), point.end()));
    return jet;
}

WJet jet_lift(const Expr& ast, std::span<const cplx> point, int order) {
    if (order != 2 && order != 3) throw PreconditionError("jet order must be 2 or 3, got " + std::to_string(order));
    const Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(ast.dimension(), ast.dimension());
    return jet_lift_affine(ast, point, identity, order);
}

cplx jet_derivative(const WJet& jet, const MultiIndex& a, const MultiIndex& b) {
    const int n = jet.dimension();
    if (static_cast<int>(a.size()) != n || static_cast<int>(b.size()) != n) {
        throw PreconditionError("multi-index length must equal the dimension");
    }
    std::vector<int> vars;
    for (int j = 0; j < n; ++j) {
        if (a[static_cast<std::size_t>(j)] < 0 || b[static_cast<std::size_t>(j)] < 0)
            throw PreconditionError("multi-index entries must be non-negative");
        for (int k = 0; k < a[static_cast<std::size_t>(j)]; ++k) vars.push_back(WJet::z(j));
        for (int k = 0; k < b[static_cast<std::size_t>(j)]; ++k) vars.push_back(jet.zbar(j));
        if (static_cast<int>(vars.size()) > jet.order()) break;
    }
    if (static_cast<int>(vars.size()) > jet.order()) {
        throw PreconditionError("multi-index of total order above the jet order " + std::to_string(jet.order()));
    }
    switch (vars.size()) {
        case 0: return jet.value();
        case 1: return jet.d(vars[0]);
        case 2: return jet.d(vars[0], vars[1]);
        default: return jet.d(vars[0], vars[1], vars[2]);
    }
}

WJet pullback(const WJet& jet, const Eigen::MatrixXcd& frame) {
    const int n = jet.dimension();
    const int m = jet.num_vars();
    const int order = jet.order();
    if (frame.rows() != n || frame.cols() != n) throw PreconditionError("frame must be n x n");
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, m);
    t.topLeftCorner(n, n) = frame;
    t.bottomRightCorner(n, n) = frame.conjugate();

    WJet out(n, order);
    out.value() = jet.value();
    if (order >= 1) {
        for (int a = 0; a < m; ++a) {
            cplx s = 0.0;
            for (int i = 0; i < m; ++i) s += t(i, a) * jet.d(i);
            out.raw()[out.idx1(a)] = s;
        }
    }
    if (order >= 2) {
        // Contract one index at a time: O(m^3) per level.
        std::vector<cplx> half(static_cast<std::size_t>(m * m));
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < m; ++b) {
                cplx s = 0.0;
                for (int j = 0; j < m; ++j) s += t(j, b) * jet.d(i, j);
                half[static_cast<std::size_t>(i * m + b)] = s;
            }
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) {
                cplx s = 0.0;
                for (int i = 0; i < m; ++i) s += t(i, a) * half[static_cast<std::size_t>(i * m + b)];
                out.raw()[out.idx2(a, b)] = s;
            }
    }
    if (order >= 3) {
        const auto mm = static_cast<std::size_t>(m);
        std::vector<cplx> s1(mm * mm * mm), s2(mm * mm * mm);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int c = 0; c < m; ++c) {
                    cplx s = 0.0;
                    for (int k = 0; k < m; ++k) s += t(k, c) * jet.d(i, j, k);
                    s1[(static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(j)) * mm + static_cast<std::size_t>(c)] = s;
                }
        for (int i = 0; i < m; ++i)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) {
                    cplx s = 0.0;
                    for (int j = 0; j < m; ++j)
                        s += t(j, b) * s1[(static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(j)) * mm +
                                          static_cast<std::size_t>(c)];
                    s2[(static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(b)) * mm + static_cast<std::size_t>(c)] = s;
                }
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c) {
                    cplx s = 0.0;
                    for (int i = 0; i < m; ++i)
                        s += t(i, a) * s2[(static_cast<std::size_t>(i) * mm + static_cast<std::size_t>(b)) * mm +
                                          static_cast<std::size_t>(c)];
                    out.raw()[out.idx3(a, b, c)] = s;
                }
    }
    if (!jet.base_point().empty()) {
        Eigen::VectorXcd p(n);
        for (int j = 0; j < n; ++j) p(j) = jet.base_point()[static_cast<std::size_t>(j)];
        Eigen::VectorXcd w = frame.fullPivLu().solve(p);
        out.set_base_point(std::vector<cplx>(w.data(), w.data() + n));
    }
    return out;
}

double reality_defect(const WJet& jet) {
    const int m = jet.num_vars();
    const int order = jet.order();
    double worst = 0.0;
    const auto check = [&](cplx x, cplx mirrored) {
        worst = std::max(worst, std::abs(x - std::conj(mirrored)) / std::max(1.0, std::abs(x)));
    };
    check(jet.value(), jet.value());
    if (order >= 1)
        for (int a = 0; a < m; ++a) check(jet.d(a), jet.d(jet.conj_var(a)));
    if (order >= 2)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) check(jet.d(a, b), jet.d(jet.conj_var(a), jet.conj_var(b)));
    if (order >= 3)
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                for (int c = 0; c < m; ++c)
                    check(jet.d(a, b, c), jet.d(jet.conj_var(a), jet.conj_var(b), jet.conj_var(c)));
    return worst;
}

WJet axpby(cplx alpha, const WJet& f, cplx beta, const WJet& g) {
    if (f.dimension() != g.dimension() || f.order() != g.order()) throw PreconditionError("jet shape mismatch");
    WJet h(f.dimension(), f.order());
    auto& out = h.raw();
    const auto& x = f.raw();
    const auto& y = g.raw();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * x[i] + beta * y[i];
    h.set_base_point(f.base_point());
    return h;
}

}  // namespace cridx
