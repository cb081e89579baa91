#pragma once

// Truncated Wirtinger jets: every mixed derivative d^{|a|+|b|} f / dz^a dzbar^b
// with |a| + |b| <= 3 of an expression at a base point, propagated exactly
// through the tree by the chain rule.
//
// Internally z_1..z_n and zbar_1..zbar_n are treated as 2n independent
// variables. Variable v < n is z_{v+1}; variable n + j is zbar_{j+1}. The
// derivative tensors are stored densely with full symmetric storage.

#include <span>
#include <vector>

#include <Eigen/Core>

#include "cridx/defexpr.hpp"

namespace cridx {

/// Multi-index over the n holomorphic (or antiholomorphic) coordinates.
using MultiIndex = std::vector<int>;

class WJet {
public:
    WJet() = default;
    /// Zero jet over `n` complex coordinates.
    WJet(int n, int order);

    int dimension() const { return n_; }
    int order() const { return order_; }
    int num_vars() const { return 2 * n_; }

    /// Base point in the original coordinates (empty when the jet was not
    /// produced by a lift).
    const std::vector<cplx>& base_point() const { return base_; }
    void set_base_point(std::vector<cplx> p) { base_ = std::move(p); }

    static int z(int j) { return j; }
    int zbar(int j) const { return n_ + j; }
    /// Index of the conjugate variable (z_j <-> zbar_j).
    int conj_var(int v) const { return v < n_ ? v + n_ : v - n_; }

    cplx value() const { return data_[0]; }
    cplx& value() { return data_[0]; }
    cplx d(int a) const { return data_[idx1(a)]; }
    cplx d(int a, int b) const { return data_[idx2(a, b)]; }
    cplx d(int a, int b, int c) const { return data_[idx3(a, b, c)]; }

    /// Writes one symmetric entry (all permutations of the index tuple).
    void set(int a, cplx v);
    void set(int a, int b, cplx v);
    void set(int a, int b, int c, cplx v);

    std::vector<cplx>& raw() { return data_; }
    const std::vector<cplx>& raw() const { return data_; }

    std::size_t idx1(int a) const { return 1 + static_cast<std::size_t>(a); }
    std::size_t idx2(int a, int b) const {
        const std::size_t m = static_cast<std::size_t>(2 * n_);
        return 1 + m + static_cast<std::size_t>(a) * m + static_cast<std::size_t>(b);
    }
    std::size_t idx3(int a, int b, int c) const {
        const std::size_t m = static_cast<std::size_t>(2 * n_);
        return 1 + m + m * m + (static_cast<std::size_t>(a) * m + static_cast<std::size_t>(b)) * m +
               static_cast<std::size_t>(c);
    }

private:
    int n_ = 0;
    int order_ = 0;
    std::vector<cplx> data_;
    std::vector<cplx> base_;
};

/// Jet of `ast` at `point`, order 2 or 3, in the coordinates z.
/// Throws PreconditionError for other orders and DomainError when a node is
/// undefined at the point.
WJet jet_lift(const Expr& ast, std::span<const cplx> point, int order);

/// Jet of w -> ast(point + frame * w) at w = 0. Coordinates are seeded with
/// dz_j/dw_a = frame(j, a). `order` may be 0..3 here.
WJet jet_lift_affine(const Expr& ast, std::span<const cplx> point, const Eigen::MatrixXcd& frame, int order);

/// Stored coefficient d^{|a|+|b|} f / dz^a dzbar^b. Throws PreconditionError
/// when |a| + |b| exceeds the jet order or the index lengths are not n.
cplx jet_derivative(const WJet& jet, const MultiIndex& a, const MultiIndex& b);

/// Tensor transform of a jet under the linear change z = frame * w: returns
/// the jet of f(frame * w) from the jet of f, both taken at corresponding points.
WJet pullback(const WJet& jet, const Eigen::MatrixXcd& frame);

/// Largest relative violation of coeffs(a,b) = conj(coeffs(b,a)) over all
/// stored entries (zero for jets of real-valued expressions).
double reality_defect(const WJet& jet);

/// Coefficientwise alpha * f + beta * g.
WJet axpby(cplx alpha, const WJet& f, cplx beta, const WJet& g);

}  // namespace cridx
