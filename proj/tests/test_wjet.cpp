#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "cridx/defexpr.hpp"
#include "cridx/errors.hpp"
#include "cridx/validation.hpp"
#include "cridx/wjet.hpp"

using namespace cridx;

namespace {

std::vector<cplx> random_point(std::mt19937_64& rng, int n, double r = 0.8) {
    std::uniform_real_distribution<double> u(-r, r);
    std::vector<cplx> p(static_cast<std::size_t>(n));
    for (auto& c : p) {
        const double re = u(rng);
        c = cplx(re, u(rng));
    }
    return p;
}

double max_abs_diff(const WJet& a, const WJet& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.raw().size(); ++i) worst = std::max(worst, std::abs(a.raw()[i] - b.raw()[i]));
    return worst;
}

}  // namespace

TEST(JetLift, Abs2Coefficients) {
    const Expr e = parse_defining_function("abs2(z1)", 2);
    const std::vector<cplx> p{cplx(1.0, 2.0), cplx(0.5, 0.0)};
    const WJet j = jet_lift(e, p, 2);
    EXPECT_NEAR(std::abs(j.value() - 5.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j.d(WJet::z(0)) - cplx(1.0, -2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j.d(j.zbar(0)) - cplx(1.0, 2.0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j.d(WJet::z(0), j.zbar(0)) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(j.d(WJet::z(0), WJet::z(0)), cplx(0.0));
    EXPECT_EQ(j.d(WJet::z(1)), cplx(0.0));
}

TEST(JetLift, LogExample) {
    const Expr e = parse_defining_function("log(1 + abs2(z1))", 2);
    const std::vector<cplx> p{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const WJet j = jet_lift(e, p, 3);
    EXPECT_NEAR(std::abs(j.d(WJet::z(0)) - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(j.d(WJet::z(0), j.zbar(0)) - 0.25), 0.0, 1e-15);
    // d^3 / dz^2 dzbar of log(1 + z zbar) is -2 zbar^2 / (1 + |z|^2)^3.
    EXPECT_NEAR(std::abs(j.d(WJet::z(0), WJet::z(0), j.zbar(0)) + 0.25), 0.0, 1e-15);
}

TEST(JetLift, QuarticThirdDerivative) {
    const Expr e = parse_defining_function("abs2(z1)^2 + abs2(z2) - 1", 2);
    const std::vector<cplx> p{cplx(1.0, 0.0), cplx(0.0, 0.0)};
    const WJet j = jet_lift(e, p, 3);
    EXPECT_NEAR(std::abs(jet_derivative(j, {2, 0}, {1, 0}) - 4.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(jet_derivative(j, {1, 0}, {1, 0}) - 4.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(jet_derivative(j, {0, 1}, {0, 1}) - 1.0), 0.0, 1e-14);
}

TEST(JetDerivative, Examples) {
    const std::vector<cplx> p{cplx(0.3, -0.7), cplx(2.0, 1.0)};
    const WJet c = jet_lift(parse_expression("7", 2), p, 3);
    EXPECT_EQ(jet_derivative(c, {0, 0}, {0, 0}), cplx(7.0));
    EXPECT_EQ(jet_derivative(c, {1, 0}, {0, 0}), cplx(0.0));
    const WJet z = jet_lift(parse_expression("z1", 2), p, 3);
    EXPECT_EQ(jet_derivative(z, {1, 0}, {0, 0}), cplx(1.0));
    EXPECT_EQ(jet_derivative(z, {0, 0}, {1, 0}), cplx(0.0));
    const WJet zb = jet_lift(parse_expression("conj(z1)", 2), p, 3);
    EXPECT_EQ(jet_derivative(zb, {0, 0}, {1, 0}), cplx(1.0));
    EXPECT_EQ(jet_derivative(zb, {1, 0}, {0, 0}), cplx(0.0));
}

TEST(JetDerivative, Errors) {
    const std::vector<cplx> p{cplx(0.0), cplx(0.0)};
    const WJet j = jet_lift(parse_defining_function("abs2(z1)", 2), p, 2);
    EXPECT_THROW(jet_derivative(j, {2, 0}, {1, 0}), PreconditionError);
    EXPECT_THROW(jet_derivative(j, {1}, {0}), PreconditionError);
    EXPECT_THROW(jet_lift(parse_defining_function("abs2(z1)", 2), p, 4), PreconditionError);
    EXPECT_THROW(jet_lift(parse_defining_function("log(abs2(z1))", 2), p, 2), DomainError);
}

TEST(FiniteDifferenceProperty, RandomExpressionsAgree) {
    const validation::SuiteResult r = validation::jet_fd_suite(11, 300, 1e-6);
    EXPECT_TRUE(r.ok()) << r.worst_case << " worst " << r.worst;
    EXPECT_LE(r.worst_aux, 1e-10);
}

TEST(FiniteDifferenceProperty, CorpusLikeFunctions) {
    const char* const texts[] = {"exp(re(z1) - abs2(z1)) * (2*re(z2) + abs2(z1)^2)", "abs2(z1)^3 + abs2(z2)^2 - 1",
                                 "sqrt(1 + abs2(z1 + 2*z2)) * cos(im(z1))"};
    std::mt19937_64 rng(3);
    for (const char* text : texts) {
        const Expr e = parse_defining_function(text, 2);
        for (int k = 0; k < 5; ++k) {
            const auto p = random_point(rng, 2);
            const WJet j = jet_lift(e, p, 3);
            for (int a = 0; a < 4; ++a)
                for (int b = a; b < 4; ++b)
                    for (int c = b; c < 4; ++c) {
                        const cplx fd = validation::fd_wirtinger(e, p, {a, b, c});
                        EXPECT_LE(std::abs(j.d(a, b, c) - fd) / std::max(1.0, std::abs(j.d(a, b, c))), 1e-6) << text;
                    }
        }
    }
}

TEST(LinearityProperty, JetOfCombinationIsCombinationOfJets) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int k = 0; k < 30; ++k) {
        const Expr f = parse_defining_function(validation::random_real_expression(rng, 2, 3), 2);
        const Expr g = parse_defining_function(validation::random_real_expression(rng, 2, 3), 2);
        const double alpha = coef(rng);
        const double beta = coef(rng);
        const auto p = random_point(rng, 2);
        WJet jf, jg, jfg;
        try {
            jf = jet_lift(f, p, 3);
            jg = jet_lift(g, p, 3);
            jfg = jet_lift(linear_combination(alpha, f, beta, g), p, 3);
        } catch (const DomainError&) {
            continue;
        }
        const WJet combo = axpby(alpha, jf, beta, jg);
        double scale = 1.0;
        for (const cplx& c : combo.raw()) scale = std::max(scale, std::abs(c));
        EXPECT_LE(max_abs_diff(jfg, combo), 1e-13 * scale);
    }
}

TEST(UnitaryCovarianceProperty, PullbackMatchesSubstitution) {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 30; ++k) {
        const int n = 2 + k % 2;
        const Expr f = parse_defining_function(validation::random_real_expression(rng, n, 3), n);
        const Eigen::MatrixXcd U = validation::random_unitary(rng, n);
        const auto p = random_point(rng, n, 0.6);
        Eigen::VectorXcd pv(n);
        for (int j = 0; j < n; ++j) pv(j) = p[static_cast<std::size_t>(j)];
        const Eigen::VectorXcd w = U.adjoint() * pv;
        std::vector<cplx> wp(w.data(), w.data() + n);
        WJet direct, pulled;
        try {
            direct = jet_lift(substitute_linear(f, U), wp, 3);
            pulled = pullback(jet_lift(f, p, 3), U);
        } catch (const DomainError&) {
            continue;
        }
        double scale = 1.0;
        for (const cplx& c : direct.raw()) scale = std::max(scale, std::abs(c));
        EXPECT_LE(max_abs_diff(direct, pulled), 1e-10 * scale);
    }
}

TEST(UnitaryCovarianceProperty, AffineLiftMatchesPullback) {
    std::mt19937_64 rng(17);
    const Expr f = parse_defining_function("exp(re(z1) - abs2(z1)) * (2*re(z2) + abs2(z1)^2)", 2);
    for (int k = 0; k < 10; ++k) {
        const Eigen::MatrixXcd U = validation::random_unitary(rng, 2);
        const auto p = random_point(rng, 2);
        const WJet a = jet_lift_affine(f, p, U, 3);
        const WJet b = pullback(jet_lift(f, p, 3), U);
        EXPECT_LE(max_abs_diff(a, b), 1e-12);
    }
}

TEST(RealityProperty, RealExpressionsHaveSelfConjugateJets) {
    std::mt19937_64 rng(19);
    for (int k = 0; k < 50; ++k) {
        const Expr f = parse_defining_function(validation::random_real_expression(rng, 3, 3), 3);
        const auto p = random_point(rng, 3);
        try {
            EXPECT_LE(reality_defect(jet_lift(f, p, 3)), 1e-12);
        } catch (const DomainError&) {
        }
    }
}

TEST(RealityProperty, HolomorphicExpressionIsDetected) {
    const std::vector<cplx> p{cplx(0.5, 0.5), cplx(0.0)};
    EXPECT_GT(reality_defect(jet_lift(parse_expression("z1 * z1", 2), p, 2)), 0.1);
}
