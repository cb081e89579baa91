#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cridx/errors.hpp"
#include "cridx/indices.hpp"

namespace cridx {
namespace {

Eigen::VectorXd hermitian_eigvals(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double rel_scale(const Eigen::VectorXd& eig) {
    return std::max({1.0, std::abs(eig(0)), std::abs(eig(eig.size() - 1))});
}

bool strictly_positive(const Eigen::MatrixXcd& a, double margin) {
    const Eigen::VectorXd eig = hermitian_eigvals(a);
    return eig(0) > margin * rel_scale(eig);
}

}  // namespace

RankOne rank_one_threshold(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& v, double psd_tol) {
    const auto r = A.rows();
    if (A.cols() != r || v.size() != r) throw PreconditionError("rank_one_threshold: shape mismatch");
    if (r == 0) return {kInf, true};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A + A.adjoint()));
    const Eigen::VectorXd eig = es.eigenvalues();
    const double scale = rel_scale(eig);
    if (eig(0) < -psd_tol * scale) return {-1.0, false};
    if (v.norm() <= psd_tol) return {kInf, true};

    const Eigen::VectorXcd c = es.eigenvectors().adjoint() * v;
    double quad = 0.0;  // v^* A^+ v
    for (Eigen::Index i = 0; i < r; ++i) {
        const double ci = std::abs(c(i));
        if (eig(i) <= psd_tol * scale) {
            if (ci > psd_tol) return {0.0, false};
        } else {
            quad += ci * ci / eig(i);
        }
    }
    return {quad > 0.0 ? 1.0 / quad : kInf, true};
}

double gamma_from_t(double t) {
    if (t < 0.0) return 0.0;
    if (std::isinf(t)) return 1.0;
    return t / (1.0 + t);
}

double t_from_gamma(double gamma) {
    if (gamma >= 1.0) return kInf;
    return gamma / (1.0 - gamma);
}

void df_threshold(const FormPair& fp, const Tolerances& tol, PointThreshold& out) {
    if (fp.A.rows() == 0) {
        out.gamma_df = 1.0;
        out.df_strict_ok = true;
        return;
    }
    const RankOne r = rank_one_threshold(fp.A, fp.v, tol.psd_tol);
    out.gamma_df = gamma_from_t(r.t_max);
    out.df_strict_ok = strictly_positive(fp.A, tol.strict_margin);
}

void steinness_threshold(const FormPair& fp, const Tolerances& tol, PointThreshold& out) {
    if (fp.A.rows() == 0) {
        out.gamma_s = 1.0;
        out.s_strict_ok = true;
        return;
    }
    const Eigen::MatrixXcd neg = -fp.A;
    const RankOne r = rank_one_threshold(neg, fp.v, tol.psd_tol);
    const double s = r.t_max;
    // gamma / (gamma - 1) = s  <=>  gamma = s / (s - 1); only s > 1 is reachable.
    if (r.inadmissible() || s <= 1.0) {
        out.gamma_s = kInf;
    } else if (std::isinf(s)) {
        out.gamma_s = 1.0;
    } else {
        out.gamma_s = s / (s - 1.0);
    }
    out.s_strict_ok = strictly_positive(neg, tol.strict_margin) && s > 1.0;
}

PointThreshold point_threshold(const FormPair& fp, const Tolerances& tol) {
    PointThreshold out;
    out.null_dim = static_cast<int>(fp.A.rows());
    df_threshold(fp, tol, out);
    steinness_threshold(fp, tol, out);
    return out;
}

PointThreshold point_threshold(const PointGeometry& g, const Tolerances& tol) {
    PointThreshold out;
    if (g.levi.null_dim() > 0) out = point_threshold(g.forms, tol);
    out.marginal = g.levi.marginal;
    return out;
}

FormPair conformal_transform(const FormPair& fp, const WJet& u_jet, const Eigen::MatrixXcd& null_basis) {
    if (null_basis.cols() != fp.A.rows() || null_basis.rows() != u_jet.dimension() - 1) {
        throw PreconditionError("conformal_transform: null basis does not match the form pair");
    }
    if (u_jet.order() < 2) throw PreconditionError("conformal_transform: u jet must have order >= 2");
    FormPair out;
    out.v = fp.v + null_basis.transpose() * tangential_gradient(u_jet);
    const Eigen::MatrixXcd a = fp.A - null_basis.transpose() * tangential_hessian(u_jet) * null_basis.conjugate();
    out.hermitian_defect = std::max(fp.hermitian_defect, (a - a.adjoint()).norm() / (1.0 + a.norm()));
    out.A = 0.5 * (a + a.adjoint());
    return out;
}

IndexSummary aggregate_indices(std::span<const PointThreshold> thresholds) {
    IndexSummary s;
    bool df_strict = true;
    bool s_strict = true;
    for (const auto& t : thresholds) {
        if (t.null_dim == 0) continue;
        ++s.n_weak_points;
        s.df_w = std::min(s.df_w, t.gamma_df);
        s.s_w = std::max(s.s_w, t.gamma_s);
        df_strict = df_strict && t.df_strict_ok;
        s_strict = s_strict && t.s_strict_ok;
    }
    s.df_s = df_strict ? s.df_w : 0.0;
    s.s_s = s_strict ? s.s_w : kInf;
    return s;
}

}  // namespace cridx
