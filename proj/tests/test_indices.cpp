#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "cridx/crgeom.hpp"
#include "cridx/errors.hpp"
#include "cridx/indices.hpp"
#include "cridx/validation.hpp"
#include "test_support.hpp"

using namespace cridx;
using cridx::testing::load_corpus;
using cridx::testing::make_spec;

namespace {

BoundaryPoint at(std::vector<cplx> p) { return BoundaryPoint{std::move(p), 1.0}; }

FormPair pair1(double a, cplx v) {
    FormPair fp;
    fp.A = Eigen::MatrixXcd::Constant(1, 1, a);
    fp.v = Eigen::VectorXcd::Constant(1, v);
    return fp;
}

PointThreshold weak(double gdf, double gs, bool strict = true) {
    PointThreshold t;
    t.null_dim = 1;
    t.gamma_df = gdf;
    t.gamma_s = gs;
    t.df_strict_ok = strict;
    t.s_strict_ok = strict;
    return t;
}

struct Prepared {
    DomainSpec spec;
    std::vector<BoundaryPoint> samples;
    std::vector<PointGeometry> geoms;
};

Prepared prepare(const std::string& stem, int count) {
    Prepared p;
    p.spec = load_corpus(stem);
    p.spec.sampling.count = count;
    p.samples = sample_boundary(p.spec);
    const auto extra = refine_weak_points(p.spec, p.samples);
    p.samples.insert(p.samples.end(), extra.begin(), extra.end());
    p.geoms = analyze_boundary(p.spec, p.samples);
    return p;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

}  // namespace

TEST(RankOne, Examples) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = 1.0;
    Eigen::VectorXcd v(2);
    v << 1.0, 1.0;
    EXPECT_NEAR(rank_one_threshold(a, v, 1e-9).t_max, 2.0 / 3.0, 1e-14);

    EXPECT_TRUE(std::isinf(rank_one_threshold(pair1(1.0, 0.0).A, pair1(1.0, 0.0).v, 1e-9).t_max));
    const RankOne neg = rank_one_threshold(pair1(-1.0, 0.0).A, pair1(-1.0, 0.0).v, 1e-9);
    EXPECT_TRUE(neg.inadmissible());
    EXPECT_EQ(neg.t_max, -1.0);

    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(2, 2);
    b(0, 0) = 1.0;
    Eigen::VectorXcd w(2);
    w << 0.0, 1.0;
    const RankOne out = rank_one_threshold(b, w, 1e-9);
    EXPECT_EQ(out.t_max, 0.0);
    EXPECT_FALSE(out.range_ok);

    EXPECT_THROW(rank_one_threshold(a, Eigen::VectorXcd::Zero(3), 1e-9), PreconditionError);
}

TEST(RankOneProperty, AgreesWithBruteForce) {
    const validation::SuiteResult r = validation::rank_one_suite(3, 400, 1e-6);
    EXPECT_TRUE(r.ok()) << r.worst_case << " worst " << r.worst;
}

TEST(RankOneProperty, ThresholdIsTight) {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g;
    for (int k = 0; k < 100; ++k) {
        const int r = 1 + k % 4;
        Eigen::MatrixXcd m(r, r);
        Eigen::VectorXcd v(r);
        for (int i = 0; i < r; ++i) {
            v(i) = cplx(g(rng), g(rng));
            for (int j = 0; j < r; ++j) m(i, j) = cplx(g(rng), g(rng));
        }
        const Eigen::MatrixXcd a = m * m.adjoint() + 0.1 * Eigen::MatrixXcd::Identity(r, r);
        const double t = rank_one_threshold(a, v, 1e-9).t_max;
        ASSERT_TRUE(std::isfinite(t));
        EXPECT_GE(eigenvalues(a - 0.999 * t * v * v.adjoint())(0), 0.0);
        EXPECT_LT(eigenvalues(a - 1.001 * t * v * v.adjoint())(0), 0.0);
    }
}

TEST(Gamma, MapsAndRoundTrip) {
    EXPECT_DOUBLE_EQ(gamma_from_t(4.0), 0.8);
    EXPECT_EQ(gamma_from_t(kInf), 1.0);
    EXPECT_EQ(gamma_from_t(-1.0), 0.0);
    EXPECT_EQ(gamma_from_t(0.0), 0.0);
    EXPECT_TRUE(std::isinf(t_from_gamma(1.0)));
    for (double t : {1e-6, 0.3, 1.0, 17.0, 1e6}) EXPECT_NEAR(t_from_gamma(gamma_from_t(t)), t, 1e-9 * std::max(1.0, t));
}

TEST(PointThresholdExamples, DfAndSteinness) {
    const Tolerances tol;
    const PointThreshold a = point_threshold(pair1(1.0, 0.5), tol);
    EXPECT_NEAR(a.gamma_df, 0.8, 1e-14);
    EXPECT_TRUE(std::isinf(a.gamma_s));
    EXPECT_TRUE(a.df_strict_ok);
    EXPECT_FALSE(a.s_strict_ok);

    const PointThreshold b = point_threshold(pair1(-1.0, 0.5), tol);
    EXPECT_EQ(b.gamma_df, 0.0);
    EXPECT_NEAR(b.gamma_s, 4.0 / 3.0, 1e-14);
    EXPECT_TRUE(b.s_strict_ok);

    const PointThreshold flat = point_threshold(pair1(0.0, 0.0), tol);
    EXPECT_EQ(flat.gamma_df, 1.0);
    EXPECT_EQ(flat.gamma_s, 1.0);
    EXPECT_FALSE(flat.df_strict_ok);
    EXPECT_FALSE(flat.s_strict_ok);

    const PointThreshold tilted = point_threshold(pair1(0.0, 0.5), tol);
    EXPECT_EQ(tilted.gamma_df, 0.0);
    EXPECT_TRUE(std::isinf(tilted.gamma_s));

    // s <= 1 cannot be reached by any finite exponent.
    EXPECT_TRUE(std::isinf(point_threshold(pair1(-0.25, 1.0), tol).gamma_s));
}

TEST(StrictWeakProperty, StrictlyPositiveFormsCoincide) {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    std::normal_distribution<double> g;
    std::vector<PointThreshold> pts;
    for (int k = 0; k < 50; ++k) {
        pts.push_back(point_threshold(pair1(u(rng), cplx(g(rng), g(rng))), Tolerances{}));
        EXPECT_TRUE(pts.back().df_strict_ok);
    }
    const IndexSummary s = aggregate_indices(pts);
    EXPECT_EQ(s.df_s, s.df_w);
    EXPECT_EQ(s.n_weak_points, 50);
}

TEST(AggregateProperty, MonotoneInTheSampleSet) {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> gdf(0.0, 1.0);
    std::uniform_real_distribution<double> gs(1.0, 10.0);
    std::vector<PointThreshold> pts;
    IndexSummary prev = aggregate_indices(pts);
    for (int k = 0; k < 40; ++k) {
        pts.push_back(weak(gdf(rng), gs(rng), k % 7 != 3));
        const IndexSummary s = aggregate_indices(pts);
        EXPECT_LE(s.df_w, prev.df_w);
        EXPECT_LE(s.df_s, prev.df_s);
        EXPECT_GE(s.s_w, prev.s_w);
        EXPECT_GE(s.s_s, prev.s_s);
        EXPECT_LE(s.df_s, s.df_w);
        EXPECT_GE(s.s_s, s.s_w);
        prev = s;
    }
}

TEST(Aggregate, Examples) {
    const std::vector<PointThreshold> a{weak(0.4, 2.0), weak(0.7, 3.0)};
    const IndexSummary s = aggregate_indices(a);
    EXPECT_EQ(s.df_w, 0.4);
    EXPECT_EQ(s.df_s, 0.4);
    EXPECT_EQ(s.s_w, 3.0);
    EXPECT_EQ(s.s_s, 3.0);
    EXPECT_EQ(s.n_weak_points, 2);

    const std::vector<PointThreshold> b{weak(0.4, 2.0), weak(0.7, 3.0, false)};
    const IndexSummary t = aggregate_indices(b);
    EXPECT_EQ(t.df_w, 0.4);
    EXPECT_EQ(t.df_s, 0.0);
    EXPECT_TRUE(std::isinf(t.s_s));

    const IndexSummary none = aggregate_indices(std::vector<PointThreshold>{PointThreshold{}});
    EXPECT_EQ(none.n_weak_points, 0);
    EXPECT_EQ(none.df_w, 1.0);
    EXPECT_EQ(none.df_s, 1.0);
    EXPECT_EQ(none.s_w, 1.0);
    EXPECT_EQ(none.s_s, 1.0);
}

TEST(Conformal, ConstantFactorChangesNothing) {
    const DomainSpec spec = make_spec("exp(re(z1) - abs2(z1)) * (2*re(z2) + abs2(z1)^2)", 2);
    const PointGeometry g = analyze_point(spec, at({0.0, 0.0}));
    const WJet u = jet_lift_affine(parse_defining_function("3", 2), g.point.p, g.frame.U, 2);
    const FormPair out = conformal_transform(g.forms, u, g.levi.null_basis);
    EXPECT_LE((out.A - g.forms.A).norm(), 1e-15);
    EXPECT_LE((out.v - g.forms.v).norm(), 1e-15);
}

TEST(Conformal, CylinderAndQuarticExamples) {
    for (const char* rho : {"abs2(z2) - 1", "abs2(z1)^2 + abs2(z2) - 1"}) {
        const DomainSpec spec = make_spec(rho, 2);
        const PointGeometry g = analyze_point(spec, at({0.0, 1.0}));
        for (double c : {-1.0, -0.25, 0.5}) {
            const Expr u = linear_combination(c, parse_defining_function("abs2(z1)", 2), 0.0,
                                              parse_defining_function("0", 2));
            const FormPair out = conformal_transform(g.forms, jet_lift_affine(u, g.point.p, g.frame.U, 2), g.levi.null_basis);
            EXPECT_NEAR(out.A(0, 0).real(), -c, 1e-14) << rho;
            EXPECT_LE(out.v.norm(), 1e-14);
        }
    }
}

TEST(ConformalProperty, MatchesFormsOfRescaledDefiningFunction) {
    const char* const us[] = {"0.3*abs2(z1) + re(z1*z2)", "-abs2(z1 - z2)", "im(z1) + 0.5*re(z1^2)"};
    for (const char* stem : {"twisted_quartic", "quartic", "quartic_tube"}) {
        const Prepared p = prepare(stem, 64);
        for (const char* utext : us) {
            const Expr u = parse_defining_function(utext, 2);
            DomainSpec scaled = p.spec;
            scaled.rho = parse_defining_function("exp(" + std::string(utext) + ") * (" + to_string(p.spec.rho) + ")", 2);
            for (const auto& g : p.geoms) {
                if (g.levi.null_dim() == 0) continue;
                const FormPair direct = conformal_transform(g.forms, jet_lift_affine(u, g.point.p, g.frame.U, 3),
                                                            g.levi.null_basis);
                const PointGeometry h = analyze_point(scaled, g.point);
                ASSERT_EQ(h.levi.null_dim(), 1) << stem;
                EXPECT_NEAR(h.forms.v.norm(), direct.v.norm(), 1e-7) << stem << " " << utext;
                EXPECT_NEAR(h.forms.A(0, 0).real(), direct.A(0, 0).real(), 1e-7) << stem << " " << utext;
            }
        }
    }
}

TEST(AffinityProperty, FormsAreAffineInCoefficients) {
    DomainSpec spec = load_corpus("twisted_quartic");
    spec.sampling.count = 64;
    spec.conformal_basis = {parse_defining_function("abs2(z1)", 2), parse_defining_function("re(z1*z2)", 2),
                            parse_defining_function("im(z1)", 2)};
    auto samples = sample_boundary(spec);
    samples.push_back(at({0.0, 0.0}));
    samples.push_back(at({0.0, cplx(0.0, 0.7)}));
    const auto geoms = analyze_boundary(spec, samples);
    const auto models = build_conformal_models(spec, geoms);
    ASSERT_FALSE(models.empty());
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        const std::vector<double> a{c(rng), c(rng), c(rng)};
        const std::vector<double> b{c(rng), c(rng), c(rng)};
        const double s = c(rng);
        std::vector<double> mix(3);
        for (int i = 0; i < 3; ++i) mix[i] = s * a[i] + (1.0 - s) * b[i];
        for (const auto& m : models) {
            const FormPair fa = apply_coefficients(m, a);
            const FormPair fb = apply_coefficients(m, b);
            const FormPair fm = apply_coefficients(m, mix);
            EXPECT_LE((fm.A - (s * fa.A + (1.0 - s) * fb.A)).norm(), 1e-12 * (1.0 + fm.A.norm()));
            EXPECT_LE((fm.v - (s * fa.v + (1.0 - s) * fb.v)).norm(), 1e-12 * (1.0 + fm.v.norm()));

            // Same as transforming with the assembled u directly.
            const PointGeometry& g = geoms[m.sample_index];
            Expr u = linear_combination(a[0], spec.conformal_basis[0], a[1], spec.conformal_basis[1]);
            u = linear_combination(1.0, u, a[2], spec.conformal_basis[2]);
            const FormPair d = conformal_transform(g.forms, jet_lift_affine(u, g.point.p, g.frame.U, 2),
                                                   g.levi.null_basis);
            EXPECT_LE((d.A - fa.A).norm(), 1e-12 * (1.0 + d.A.norm()));
            EXPECT_LE((d.v - fa.v).norm(), 1e-12 * (1.0 + d.v.norm()));
        }
    }
}

TEST(Optimizer, EmptyBasisEqualsBaseline) {
    const Prepared p = prepare("cylinder", 64);
    std::vector<PointThreshold> base;
    for (const auto& g : p.geoms) base.push_back(point_threshold(g, p.spec.tolerances));
    const IndexSummary b = aggregate_indices(base);
    const OptimizationResult r = optimize_trivialization(p.spec, p.geoms, Objective::DF, 100);
    EXPECT_TRUE(r.coeffs.empty());
    EXPECT_EQ(r.summary.df_w, b.df_w);
    EXPECT_EQ(r.summary.df_s, b.df_s);
    EXPECT_EQ(r.summary.n_weak_points, b.n_weak_points);
    EXPECT_EQ(b.df_s, 0.0);
}

TEST(Optimizer, QuarticReachesOne) {
    const Prepared p = prepare("quartic", 128);
    const OptimizationResult df = optimize_trivialization(p.spec, p.geoms, Objective::DF, p.spec.optimizer.budget);
    ASSERT_EQ(df.coeffs.size(), 1u);
    EXPECT_LT(df.coeffs[0], 0.0);
    EXPECT_GE(df.summary.df_s, 0.99);
    EXPECT_GT(df.summary.n_weak_points, 0);
    const OptimizationResult s = optimize_trivialization(p.spec, p.geoms, Objective::Steinness, p.spec.optimizer.budget);
    EXPECT_GT(s.coeffs[0], 0.0);
    EXPECT_LE(s.summary.s_s, 1.01);

    const OptimizationResult again = optimize_trivialization(p.spec, p.geoms, Objective::DF, p.spec.optimizer.budget);
    EXPECT_EQ(again.coeffs, df.coeffs);
}

TEST(Optimizer, PluriharmonicFactorsCannotHelpCylinder) {
    const Prepared p = prepare("cylinder_pluriharmonic", 128);
    const OptimizationResult df = optimize_trivialization(p.spec, p.geoms, Objective::DF, 400);
    EXPECT_EQ(df.summary.df_s, 0.0);
    const OptimizationResult s = optimize_trivialization(p.spec, p.geoms, Objective::Steinness, 400);
    EXPECT_TRUE(std::isinf(s.summary.s_s));
}

TEST(Optimizer, NeverWorseThanBaseline) {
    for (const char* stem : {"quartic", "twisted_quartic"}) {
        const Prepared p = prepare(stem, 64);
        const std::vector<double> zero(p.spec.conformal_basis.size(), 0.0);
        const OptimizationResult base = evaluate_trivialization(p.spec, p.geoms, zero);
        const auto models = build_conformal_models(p.spec, p.geoms);
        const OptimizationResult r = optimize_trivialization(p.spec, p.geoms, Objective::DF, 300);
        EXPECT_LE(r.objective, trivialization_objective(models, zero, p.spec.tolerances, Objective::DF)) << stem;
        EXPECT_GE(r.summary.df_w, base.summary.df_w - 1e-12) << stem;
    }
}

TEST(Oracle, BallMatchesClosedForm) {
    DomainSpec spec = load_corpus("ball");
    spec.sampling.count = 64;
    const auto samples = sample_boundary(spec);
    for (double gamma : {0.2, 0.5, 0.99}) {
        const OracleVerdict v = interior_psh_oracle(spec, samples, gamma);
        EXPECT_TRUE(v.all_psd);
        ASSERT_EQ(v.min_eig_by_distance.size(), 3u);
        for (const auto& [d, e] : v.min_eig_by_distance) {
            const double s = (1.0 - d) * (1.0 - d);
            EXPECT_NEAR(e, std::min(1.0, (1.0 - gamma * s) / (1.0 - s)), 1e-6) << d;
        }
    }
    for (double gamma : {1.01, 2.0, 10.0}) {
        const OracleVerdict v = exterior_psh_oracle(spec, samples, gamma);
        EXPECT_TRUE(v.all_psd);
        for (const auto& [d, e] : v.min_eig_by_distance) {
            const double s = (1.0 + d) * (1.0 + d);
            EXPECT_NEAR(e, std::min(1.0, (gamma * s - 1.0) / (s - 1.0)), 1e-6) << d;
        }
    }
    EXPECT_EQ(oracle_exponent_search(spec, samples, OracleSide::Interior).exponent, spec.oracle.interior.hi);
    EXPECT_EQ(oracle_exponent_search(spec, samples, OracleSide::Exterior).exponent, spec.oracle.exterior.lo);
}

TEST(Oracle, CylinderNearOne) {
    DomainSpec spec = load_corpus("cylinder");
    spec.sampling.count = 64;
    const auto samples = sample_boundary(spec);
    EXPECT_TRUE(interior_psh_oracle(spec, samples, 0.999).all_psd);
    EXPECT_TRUE(exterior_psh_oracle(spec, samples, 1.001).all_psd);
    EXPECT_THROW(interior_psh_oracle(spec, samples, 1.0), PreconditionError);
    EXPECT_THROW(exterior_psh_oracle(spec, samples, 1.0), PreconditionError);
    EXPECT_THROW(interior_psh_oracle(spec, samples, 0.0), PreconditionError);
    EXPECT_THROW(interior_psh_oracle(spec, {}, 0.5), SamplingError);
    EXPECT_GE(oracle_exponent_search(spec, samples, OracleSide::Interior).exponent, 0.995);
    EXPECT_LE(oracle_exponent_search(spec, samples, OracleSide::Exterior).exponent, 1.005);
}

TEST(Oracle, TwistedQuarticExponentMatchesPointwiseValue) {
    DomainSpec spec = load_corpus("twisted_quartic");
    spec.sampling.count = 64;
    auto samples = sample_boundary(spec);
    samples.push_back(at({0.0, 0.0}));
    const OracleVerdict ok = interior_psh_oracle(spec, samples, 0.79);
    EXPECT_TRUE(ok.all_psd);
    const OracleVerdict bad = interior_psh_oracle(spec, samples, 0.81);
    EXPECT_FALSE(bad.all_psd);
    EXPECT_FALSE(bad.witnesses.empty());
    EXPECT_LE(bad.witnesses.size(), 5u);
    const ExponentSearch e = oracle_exponent_search(spec, samples, OracleSide::Interior);
    EXPECT_TRUE(e.monotone);
    EXPECT_NEAR(e.exponent, 0.8, 2e-3);
}

TEST(OracleProperty, PredicateIsMonotoneInGamma) {
    DomainSpec spec = load_corpus("twisted_quartic");
    spec.sampling.count = 32;
    auto samples = sample_boundary(spec);
    samples.push_back(at({0.0, 0.0}));
    const OracleProbe in(spec, samples, OracleSide::Interior);
    bool seen_fail = false;
    for (double g = 0.05; g < 1.0; g += 0.05) {
        const bool ok = in.all_psd(g);
        if (seen_fail) EXPECT_FALSE(ok) << g;
        seen_fail = seen_fail || !ok;
    }
    EXPECT_TRUE(seen_fail);
}

TEST(StrongOka, Examples) {
    DomainSpec ball = load_corpus("ball");
    ball.sampling.count = 64;
    const double m = strong_oka_margin(ball, sample_boundary(ball));
    EXPECT_NEAR(m, 1.0 / (1.0 - 0.99 * 0.99), 1e-6);

    DomainSpec cyl = load_corpus("cylinder");
    cyl.sampling.count = 64;
    EXPECT_NEAR(strong_oka_margin(cyl, sample_boundary(cyl)), 0.0, 1e-9);

    // At the weak point of the twisted domain the margin is positive and
    // bounded by the smallest eigenvalue of A there.
    const DomainSpec tw = make_spec("exp(re(z1) - abs2(z1)) * (2*re(z2) + abs2(z1)^2)", 2);
    const std::vector<BoundaryPoint> origin{at({0.0, 0.0})};
    const double mt = strong_oka_margin(tw, origin);
    EXPECT_GT(mt, 0.5);
    EXPECT_LE(mt, analyze_point(tw, origin[0]).forms.A(0, 0).real() + 1e-4);
}
