#include <cmath>
#include <cstdio>
#include <random>

#include "../detail.hpp"
#include "cridx/defexpr.hpp"
#include "cridx/errors.hpp"

namespace cridx {
namespace {

cplx eval_node(const ExprNode& node, std::span<const cplx> z) {
    const auto arg = [&](std::size_t k) { return eval_node(*node.args[k], z); };
    switch (node.kind) {
        case NodeKind::Constant: return node.value;
        case NodeKind::Coord: return z[static_cast<std::size_t>(node.index)];
        case NodeKind::Conj: return std::conj(arg(0));
        case NodeKind::Re: return arg(0).real();
        case NodeKind::Im: return arg(0).imag();
        case NodeKind::Abs2: {
            cplx a = arg(0);
            return a * std::conj(a);
        }
        case NodeKind::Neg: return -arg(0);
        case NodeKind::Add: return arg(0) + arg(1);
        case NodeKind::Sub: return arg(0) - arg(1);
        case NodeKind::Mul: return arg(0) * arg(1);
        case NodeKind::Div: {
            cplx num = arg(0);
            cplx den = arg(1);
            detail::check_nonzero_divisor(den);
            return num / den;
        }
        case NodeKind::Pow: {
            cplx base = arg(0);
            int k = node.exponent;
            if (k < 0) {
                detail::check_nonzero_divisor(base);
                base = 1.0 / base;
                k = -k;
            }
            cplx result = 1.0;
            for (int i = 0; i < k; ++i) result *= base;
            return result;
        }
        case NodeKind::Exp: return std::exp(arg(0));
        case NodeKind::Log: return std::log(detail::positive_real_argument(arg(0), "log"));
        case NodeKind::Sin: return std::sin(arg(0));
        case NodeKind::Cos: return std::cos(arg(0));
        case NodeKind::Sqrt: return std::sqrt(detail::positive_real_argument(arg(0), "sqrt"));
    }
    throw Error("corrupt expression node");
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_constant(cplx c) {
    if (c.imag() == 0.0) {
        // Negative literals need parentheses so that "a-(-1)" and "(-1)^2" parse back.
        std::string s = format_double(c.real());
        return c.real() < 0.0 || std::signbit(c.real()) ? "(" + s + ")" : s;
    }
    return "(" + format_double(c.real()) + "+(" + format_double(c.imag()) + ")*i)";
}

const char* function_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::Conj: return "conj";
        case NodeKind::Re: return "re";
        case NodeKind::Im: return "im";
        case NodeKind::Abs2: return "abs2";
        case NodeKind::Exp: return "exp";
        case NodeKind::Log: return "log";
        case NodeKind::Sin: return "sin";
        case NodeKind::Cos: return "cos";
        case NodeKind::Sqrt: return "sqrt";
        default: return nullptr;
    }
}

void print_node(const ExprNode& node, std::string& out) {
    switch (node.kind) {
        case NodeKind::Constant: out += format_constant(node.value); return;
        case NodeKind::Coord: out += "z" + std::to_string(node.index + 1); return;
        case NodeKind::Neg:
            out += "(-";
            print_node(*node.args[0], out);
            out += ")";
            return;
        case NodeKind::Add:
        case NodeKind::Sub:
        case NodeKind::Mul:
        case NodeKind::Div: {
            const char op = node.kind == NodeKind::Add   ? '+'
                            : node.kind == NodeKind::Sub ? '-'
                            : node.kind == NodeKind::Mul ? '*'
                                                         : '/';
            out += "(";
            print_node(*node.args[0], out);
            out += op;
            print_node(*node.args[1], out);
            out += ")";
            return;
        }
        case NodeKind::Pow:
            out += "(";
            print_node(*node.args[0], out);
            out += "^" + std::to_string(node.exponent) + ")";
            return;
        default:
            out += function_name(node.kind);
            out += "(";
            print_node(*node.args[0], out);
            out += ")";
            return;
    }
}

NodePtr substitute_node(const NodePtr& node, const std::vector<NodePtr>& coords) {
    if (node->kind == NodeKind::Coord) return coords[static_cast<std::size_t>(node->index)];
    if (node->args.empty()) return node;
    auto copy = std::make_shared<ExprNode>(*node);
    for (auto& a : copy->args) a = substitute_node(a, coords);
    return copy;
}

NodePtr binary(NodeKind kind, NodePtr a, NodePtr b) {
    auto node = std::make_shared<ExprNode>();
    node->kind = kind;
    node->args = {std::move(a), std::move(b)};
    return node;
}

NodePtr constant(cplx c) {
    auto node = std::make_shared<ExprNode>();
    node->kind = NodeKind::Constant;
    node->value = c;
    return node;
}

}  // namespace

cplx eval_complex(const Expr& expr, std::span<const cplx> point) {
    if (expr.empty()) throw PreconditionError("empty expression");
    if (static_cast<int>(point.size()) != expr.dimension()) {
        throw PreconditionError("point has " + std::to_string(point.size()) + " coordinates, expected " +
                                std::to_string(expr.dimension()));
    }
    return eval_node(expr.root(), point);
}

double eval_expr(const Expr& expr, std::span<const cplx> point) {
    cplx value = eval_complex(expr, point);
    if (std::abs(value.imag()) > detail::kRealResidueTol * (1.0 + std::abs(value.real()))) {
        throw DomainError("expression is not real-valued at the point (imaginary part " +
                          format_double(value.imag()) + ")");
    }
    return value.real();
}

std::string to_string(const Expr& expr) {
    std::string out;
    if (!expr.empty()) print_node(expr.root(), out);
    return out;
}

Expr substitute_linear(const Expr& expr, const Eigen::MatrixXcd& m, std::span<const cplx> shift) {
    const int n = expr.dimension();
    if (m.rows() != n || m.cols() != n) throw PreconditionError("substitution matrix must be n x n");
    if (!shift.empty() && static_cast<int>(shift.size()) != n) throw PreconditionError("shift must have n entries");
    std::vector<NodePtr> coords;
    coords.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        NodePtr acc = shift.empty() ? nullptr : constant(shift[static_cast<std::size_t>(j)]);
        for (int k = 0; k < n; ++k) {
            if (m(j, k) == cplx(0.0, 0.0)) continue;
            auto zk = std::make_shared<ExprNode>();
            zk->kind = NodeKind::Coord;
            zk->index = k;
            NodePtr term = binary(NodeKind::Mul, constant(m(j, k)), zk);
            acc = acc ? binary(NodeKind::Add, acc, term) : term;
        }
        coords.push_back(acc ? acc : constant(0.0));
    }
    return Expr(substitute_node(expr.root_ptr(), coords), n);
}

Expr linear_combination(double alpha, const Expr& a, double beta, const Expr& b) {
    if (a.dimension() != b.dimension()) throw PreconditionError("dimension mismatch");
    return Expr(binary(NodeKind::Add, binary(NodeKind::Mul, constant(alpha), a.root_ptr()),
                       binary(NodeKind::Mul, constant(beta), b.root_ptr())),
                a.dimension());
}

void check_realness(const Expr& expr) {
    const int n = expr.dimension();
    std::mt19937_64 rng(0x5eed'0f'7ea1ULL);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    std::vector<cplx> z(static_cast<std::size_t>(n));
    int checked = 0;
    for (int attempt = 0; attempt < 256 && checked < 16; ++attempt) {
        for (auto& zj : z) zj = cplx(coord(rng), coord(rng));
        cplx value;
        try {
            value = eval_complex(expr, z);
        } catch (const DomainError&) {
            continue;
        }
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) continue;
        if (std::abs(value.imag()) > detail::kRealResidueTol * (1.0 + std::abs(value))) {
            throw DomainError("expression '" + to_string(expr) + "' is not real-valued (imaginary part " +
                              format_double(value.imag()) + ")");
        }
        ++checked;
    }
    if (checked == 0) throw DomainError("expression could not be evaluated at any probe point");
}

}  // namespace cridx
