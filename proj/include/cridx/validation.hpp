#pragma once

// Reference routines that share no code with the jet engine or the
// pseudoinverse path: nested finite differences, a brute-force scan for the
// rank-one threshold, and the suites behind `cridx selftest`.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cridx/defexpr.hpp"

namespace cridx::validation {

/// Mixed Wirtinger derivative by nested central differences with step h,
/// one Richardson step (h and 2h). `vars` lists up to three variables,
/// v < n for d/dz_{v+1} and v >= n for d/dzbar_{v-n+1}.
cplx fd_wirtinger(const Expr& expr, const std::vector<cplx>& point, const std::vector<int>& vars, double h = 1e-3);

/// Random smooth real-valued expression text over z1..zn, well defined on
/// the box |Re z_j|, |Im z_j| <= 1.
std::string random_real_expression(std::mt19937_64& rng, int n, int depth = 3);

/// sup{t >= 0 : eig_min(A - t v v^*) >= -abs_tol} found by a geometric scan
/// of [0, t_cap] followed by bisection; -1 when t = 0 already fails and inf
/// when t_cap still passes.
double brute_force_rank_one(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& v, double abs_tol,
                            double t_cap = 1e3);

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    double worst = 0.0;       // largest relative error / disagreement
    double worst_aux = 0.0;   // reality defect for the jet suite
    std::string worst_case;

    bool ok() const { return failures == 0; }
};

/// `count` random (expression, point, multi-index) triples of order <= 3
/// compared with fd_wirtinger; fails a case above `rel_tol`. Also records
/// the largest reality defect of the lifted jets (must stay <= 1e-10).
SuiteResult jet_fd_suite(std::uint64_t seed, int count = 500, double rel_tol = 1e-6);

/// `count` random PSD instances of size <= 4 compared with the brute-force
/// scan; fails a case above `rel_tol` relative disagreement.
SuiteResult rank_one_suite(std::uint64_t seed, int count = 1000, double rel_tol = 1e-6);

/// Random unitary matrix (QR of a complex Gaussian matrix, phases fixed).
Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n);

}  // namespace cridx::validation
