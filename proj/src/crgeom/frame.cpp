#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "cridx/crgeom.hpp"
#include "cridx/errors.hpp"
#include "cridx/parallel.hpp"

namespace cridx {
namespace {

Eigen::VectorXcd dbar_rho(const DomainSpec& spec, std::span<const cplx> p) {
    const int n = spec.n;
    WJet jet = jet_lift_affine(spec.rho, p, Eigen::MatrixXcd::Identity(n, n), 1);
    Eigen::VectorXcd g(n);
    for (int j = 0; j < n; ++j) g(j) = jet.d(jet.zbar(j));
    return g;
}

std::string describe(const std::vector<cplx>& p) {
    std::ostringstream os;
    os.precision(10);
    os << '(';
    for (std::size_t j = 0; j < p.size(); ++j) os << (j ? ", " : "") << p[j].real() << (p[j].imag() < 0 ? "" : "+") << p[j].imag() << 'i';
    os << ')';
    return os.str();
}

}  // namespace

UnitaryFrame adapted_frame(const DomainSpec& spec, const BoundaryPoint& p) {
    const int n = spec.n;
    const Eigen::VectorXcd g = dbar_rho(spec, p.p);
    const double norm = g.norm();
    if (!(norm > 0.0)) throw PreconditionError("adapted_frame: gradient of rho vanishes at " + describe(p.p));
    const Eigen::VectorXcd nu = g / norm;

    const cplx last = nu(n - 1);
    const cplx phase = std::abs(last) > 0.0 ? last / std::abs(last) : cplx(1.0);
    // x = nu + phase e_n has |x_n| >= 1, so the reflection H nu = -phase e_n
    // does not lose accuracy when nu is close to e_n.
    Eigen::VectorXcd x = nu;
    x(n - 1) += phase;

    Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(n, n);
    h -= (2.0 / x.squaredNorm()) * x * x.adjoint();

    UnitaryFrame frame;
    frame.U = h;
    frame.U.col(n - 1) *= -phase;
    frame.normal_index = n;
    return frame;
}

WJet frame_jet(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame, int order) {
    return jet_lift_affine(spec.rho, p.p, frame.U, order);
}

LeviData levi_from_jet(const WJet& jet, const Tolerances& tol) {
    const int t = jet.dimension() - 1;
    LeviData out;
    out.levi.resize(t, t);
    for (int j = 0; j < t; ++j)
        for (int k = 0; k < t; ++k) out.levi(j, k) = jet.d(WJet::z(j), jet.zbar(k));

    // The form X -> sum levi(j,k) X_j conj(X_k) is X^* levi^T X.
    const Eigen::MatrixXcd form = out.levi.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (form + form.adjoint()));
    if (es.info() != Eigen::Success) throw Error("Levi eigen-decomposition failed");
    out.eigvals = es.eigenvalues();
    out.eigvecs = es.eigenvectors();

    // Eigenvalues are measured against |d rho| so that the null space and
    // the pseudoconvexity test do not change when rho is multiplied by a
    // positive constant.
    double g2 = 0.0;
    for (int j = 0; j <= t; ++j) g2 += std::norm(jet.d(WJet::z(j)));
    out.grad_norm = std::sqrt(g2);
    const double lmax = out.eigvals(t - 1);
    const double lmin = out.eigvals(0);
    out.scale = std::max({out.grad_norm, std::abs(lmax), std::abs(lmin)});
    out.pseudoconvex = lmin >= -tol.psd_tol * out.scale;

    const double cut = tol.null_eig_rel_tol * std::max(out.grad_norm, lmax);
    int r = 0;
    while (r < t && out.eigvals(r) <= cut) ++r;
    out.null_basis = out.eigvecs.leftCols(r);
    for (int i = 0; i < t; ++i) {
        const double l = out.eigvals(i);
        if (l > cut / 10.0 && l <= cut * 10.0) out.marginal = true;
    }
    return out;
}

LeviData levi_data(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame) {
    return levi_from_jet(frame_jet(spec, p, frame, 2), spec.tolerances);
}

FormPair dangelo_from_jet(const WJet& jet, const LeviData& levi) {
    if (jet.order() < 3) throw PreconditionError("dangelo_forms needs an order-3 jet");
    const int n = jet.dimension();
    const int t = n - 1;
    const int r = levi.null_dim();
    if (r == 0) throw PreconditionError("dangelo_forms: trivial null space");
    const int nb = jet.zbar(n - 1);
    const cplx g = jet.d(nb);
    if (g == cplx(0.0)) throw PreconditionError("dangelo_forms: d rho / d wbar_n vanishes");

    // omega_j = d log g / d w_j and H_jk = -d^2 log g / d w_j d wbar_k with
    // g = d rho / d wbar_n.
    Eigen::VectorXcd omega(t);
    Eigen::MatrixXcd hess(t, t);
    for (int j = 0; j < t; ++j) omega(j) = jet.d(WJet::z(j), nb) / g;
    for (int j = 0; j < t; ++j)
        for (int k = 0; k < t; ++k) {
            const cplx gjk = jet.d(WJet::z(j), jet.zbar(k), nb);
            const cplx gj = jet.d(WJet::z(j), nb);
            const cplx gk = jet.d(jet.zbar(k), nb);
            hess(j, k) = -(gjk * g - gj * gk) / (g * g);
        }

    const Eigen::MatrixXcd& nbasis = levi.null_basis;
    FormPair fp;
    fp.v = nbasis.transpose() * omega;
    const Eigen::MatrixXcd a = nbasis.transpose() * hess * nbasis.conjugate();
    fp.hermitian_defect = (a - a.adjoint()).norm() / (1.0 + a.norm());
    fp.A = 0.5 * (a + a.adjoint());
    return fp;
}

FormPair dangelo_forms(const DomainSpec& spec, const BoundaryPoint& p, const UnitaryFrame& frame, const LeviData& levi) {
    return dangelo_from_jet(frame_jet(spec, p, frame, 3), levi);
}

Eigen::VectorXcd tangential_gradient(const WJet& jet) {
    const int t = jet.dimension() - 1;
    Eigen::VectorXcd g(t);
    for (int j = 0; j < t; ++j) g(j) = jet.d(WJet::z(j));
    return g;
}

Eigen::MatrixXcd tangential_hessian(const WJet& jet) {
    const int t = jet.dimension() - 1;
    Eigen::MatrixXcd h(t, t);
    for (int j = 0; j < t; ++j)
        for (int k = 0; k < t; ++k) h(j, k) = jet.d(WJet::z(j), jet.zbar(k));
    return h;
}

PointGeometry analyze_point(const DomainSpec& spec, const BoundaryPoint& p) {
    PointGeometry out;
    out.point = p;
    out.frame = adapted_frame(spec, p);
    const WJet jet = frame_jet(spec, p, out.frame, 3);
    out.levi = levi_from_jet(jet, spec.tolerances);
    if (out.levi.pseudoconvex && out.levi.null_dim() > 0) out.forms = dangelo_from_jet(jet, out.levi);
    return out;
}

std::vector<PointGeometry> analyze_boundary(const DomainSpec& spec, const std::vector<BoundaryPoint>& samples) {
    auto geoms = parallel_map(samples, [&](const BoundaryPoint& p) { return analyze_point(spec, p); });
    for (const auto& g : geoms) {
        if (!g.levi.pseudoconvex) {
            std::ostringstream os;
            os.precision(6);
            os << "boundary is not pseudoconvex: Levi eigenvalue " << g.levi.eigvals(0) << " at "
               << describe(g.point.p);
            throw PseudoconvexityError(os.str());
        }
    }
    return geoms;
}

}  // namespace cridx
