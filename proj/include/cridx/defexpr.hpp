#pragma once

// Defining functions rho: C^n -> R written as small infix expressions over
// the complex coordinates z1..zn, plus the run configuration that carries them.

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace cridx {

using cplx = std::complex<double>;

enum class NodeKind {
    Constant,  // complex constant; real unless produced by `i` or a substitution
    Coord,     // z_{index+1}
    Conj,
    Re,
    Im,
    Abs2,  // e * conj(e)
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent stored in `exponent`
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
};

struct ExprNode {
    NodeKind kind;
    cplx value{};      // Constant
    int index = 0;     // Coord, 0-based
    int exponent = 0;  // Pow
    std::vector<std::shared_ptr<const ExprNode>> args;
};

using NodePtr = std::shared_ptr<const ExprNode>;

/// Immutable expression tree over n complex coordinates. Copies share nodes.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, int n) : root_(std::move(root)), n_(n) {}

    const ExprNode& root() const { return *root_; }
    const NodePtr& root_ptr() const { return root_; }
    int dimension() const { return n_; }
    bool empty() const { return !root_; }

private:
    NodePtr root_;
    int n_ = 0;
};

/// Parses `text` as a real-valued function of z1..zn.
///
/// Grammar: infix `+ - * /`, unary minus, `^` with an integer exponent,
/// parentheses, decimal literals, the imaginary unit `i`, coordinates
/// z1..zn, and the functions conj, re, im, abs2, exp, log, sin, cos, sqrt.
/// The result must pass a realness check at 16 pseudo-random points.
///
/// Throws ParseError on syntax errors, unknown identifiers and out-of-range
/// coordinates; DomainError when the realness check fails.
Expr parse_defining_function(std::string_view text, int n);

/// Same grammar without the realness check (used for building blocks).
Expr parse_expression(std::string_view text, int n);

/// Complex value of the tree at `point`. Throws DomainError on log/sqrt of
/// something other than a positive real and on division by zero.
cplx eval_complex(const Expr& expr, std::span<const cplx> point);

/// Real value at `point`; an imaginary residue up to 1e-12 (1 + |value|) is
/// discarded, anything larger raises DomainError.
double eval_expr(const Expr& expr, std::span<const cplx> point);

/// Fully parenthesised text that parses back to an equivalent tree.
std::string to_string(const Expr& expr);

/// Tree for z -> expr(shift + M z). Used to move a domain by an affine map.
Expr substitute_linear(const Expr& expr, const Eigen::MatrixXcd& m, std::span<const cplx> shift = {});

/// Builds alpha * a + beta * b as a tree (no simplification).
Expr linear_combination(double alpha, const Expr& a, double beta, const Expr& b);

/// Realness probe used by the parser: evaluates at 16 deterministic points in
/// the box |Re z_j|, |Im z_j| <= 2 and checks the imaginary residue.
void check_realness(const Expr& expr);

// ---------------------------------------------------------------------------
// Run configuration

struct SamplingConfig {
    std::uint64_t seed = 42;
    int count = 512;
    double newton_tol = 1e-12;
    int max_newton_iters = 50;
    double box_radius = 4.0;
    /// Number of low-Levi-eigenvalue samples used as starting points for the
    /// search of weakly pseudoconvex points (0 disables it).
    int weak_refine = 32;
};

struct Tolerances {
    double null_eig_rel_tol = 1e-7;
    double psd_tol = 1e-9;
    double strict_margin = 1e-8;
};

struct GammaGrid {
    double lo = 0.0;
    double hi = 0.0;
    double bisect_tol = 0.0;
};

struct OracleConfig {
    std::vector<double> distances{1e-2, 1e-3, 1e-4};
    GammaGrid interior{0.01, 0.999, 1e-4};
    GammaGrid exterior{1.001, 64.0, 1e-3};
};

struct OptimizerConfig {
    int budget = 2000;
    int restarts = 8;
};

struct DomainSpec {
    std::string name;
    int n = 0;
    Expr rho;
    SamplingConfig sampling;
    Tolerances tolerances;
    OracleConfig oracle;
    std::vector<Expr> conformal_basis;
    OptimizerConfig optimizer;
};

/// Parses a JSON configuration. Mandatory keys: `n`, `rho`. Everything else
/// falls back to the defaults above. Unknown keys are rejected.
DomainSpec load_domain_config(std::string_view contents);

/// Checks every DomainSpec invariant; throws ConfigError on the first violation.
void validate(const DomainSpec& spec);

/// JSON text that `load_domain_config` turns back into an equivalent spec.
std::string dump_domain_config(const DomainSpec& spec);

}  // namespace cridx
