#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "unijadi/diagnostics.hpp"
#include "unijadi/problems.hpp"
#include "unijadi/solver.hpp"

using namespace unijadi;

TEST_CASE("haar_unitary produces deterministic unitary matrices") {
    CounterRng a(42, 1), b(42, 1);
    auto Q1 = haar_unitary(5, a);
    auto Q2 = haar_unitary(5, b);
    CHECK((Q1 * Q1.adjoint() - Eigen::MatrixXcd::Identity(5, 5)).norm() < 1e-13);
    CHECK((Q1 - Q2).norm() == 0.0);

    CounterRng c(43, 1);
    CHECK((Q1 - haar_unitary(5, c)).norm() > 1e-3);
}

TEST_CASE("haar_unitary entry moduli have the uniform-column statistics") {
    // |Q_ij|^2 of a Haar column follows Beta(1, n-1): mean 1/n and variance
    // (n-1)/(n^2(n+1)). 1e4 draws at n=4 give a standard error of 0.0019.
    const int n = 4, draws = 10000;
    CounterRng rng(7, 99);
    double sum00 = 0.0, sum21 = 0.0;
    for (int k = 0; k < draws; ++k) {
        auto Q = haar_unitary(n, rng);
        sum00 += std::norm(Q(0, 0));
        sum21 += std::norm(Q(2, 1));
    }
    const double se3 = 3.0 * std::sqrt((n - 1.0) / (n * n * (n + 1.0)) / draws);
    CHECK(std::abs(sum00 / draws - 1.0 / n) < se3);
    CHECK(std::abs(sum21 / draws - 1.0 / n) < se3);
}

TEST_CASE("random joint matrices live in the unit box and are reproducible") {
    auto prob = gen_random_joint_matrices(10, 5, 12345);
    CHECK(prob.cost.n() == 10);
    REQUIRE(prob.cost.terms().size() == 5);
    for (const auto& term : prob.cost.terms()) {
        CHECK(term.tensor.order() == 2);
        for (std::size_t flat = 0; flat < term.tensor.size(); ++flat) {
            const cplx v = term.tensor[flat];
            CHECK(v.real() >= 0.0);
            CHECK(v.real() < 1.0);
            CHECK(v.imag() >= 0.0);
            CHECK(v.imag() < 1.0);
        }
    }
    CHECK_FALSE(prob.truth.U_star.has_value());
    CHECK_FALSE(prob.truth.f_star.has_value());

    auto again = gen_random_joint_matrices(10, 5, 12345);
    for (std::size_t l = 0; l < 5; ++l)
        for (std::size_t flat = 0; flat < again.cost.terms()[l].tensor.size(); ++flat)
            CHECK(again.cost.terms()[l].tensor[flat] == prob.cost.terms()[l].tensor[flat]);

    auto other = gen_random_joint_matrices(10, 5, 54321);
    CHECK(other.cost.terms()[0].tensor[0] != prob.cost.terms()[0].tensor[0]);

    CHECK_THROWS_AS(gen_random_joint_matrices(1, 5, 0), std::invalid_argument);
    CHECK_THROWS_AS(gen_random_joint_matrices(4, 0, 0), std::invalid_argument);
}

TEST_CASE("noiseless near-diagonalizable family is exact at the planted unitary") {
    const int n = 6, L = 6;
    auto prob = gen_near_diagonalizable(n, L, 0.0, 2024);
    REQUIRE(prob.truth.U_star.has_value());
    REQUIRE(prob.truth.f_star.has_value());
    CHECK(*prob.truth.f_star == doctest::Approx(L * (n + 3.0)));
    CHECK(*prob.truth.regularity_expected);

    const auto& U = *prob.truth.U_star;
    CHECK(evaluate(prob.cost, U) == doctest::Approx(*prob.truth.f_star).epsilon(1e-12));
    auto state = rotate_full(prob.cost, U);
    CHECK(state.lambda.norm() < 1e-12);
    CHECK(off_diagonal_energy(prob.cost, state) < 1e-20);

    REQUIRE(prob.truth.spectra.has_value());
    REQUIRE(prob.truth.spectra->size() == L);
    CHECK((*prob.truth.spectra)[2][2] == doctest::Approx(2.0));
    CHECK((*prob.truth.spectra)[2][3] == doctest::Approx(1.0));
}

TEST_CASE("solver recovers the planted diagonalizer from a cold start") {
    auto prob = gen_near_diagonalizable(6, 6, 0.0, 77);
    SolverConfig config;
    config.grad_tol = 1e-9;
    config.max_sweeps = 30;
    auto res = jacobi_g_solve(prob.cost, Eigen::MatrixXcd::Identity(6, 6), config);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.f_final == doctest::Approx(*prob.truth.f_star).epsilon(1e-9));
    auto state = rotate_full(prob.cost, res.U_final);
    CHECK(off_diagonal_energy(prob.cost, state) <= 1e-10);
}

TEST_CASE("noise shifts the family by the advertised scale") {
    const double sigma = 1e-6;
    auto clean = gen_near_diagonalizable(5, 5, 0.0, 31);
    auto noisy = gen_near_diagonalizable(5, 5, sigma, 31);
    double max_entry_dev = 0.0;
    for (std::size_t l = 0; l < 5; ++l)
        for (std::size_t flat = 0; flat < clean.cost.terms()[l].tensor.size(); ++flat)
            max_entry_dev = std::max(max_entry_dev,
                                     std::abs(noisy.cost.terms()[l].tensor[flat] -
                                              clean.cost.terms()[l].tensor[flat]));
    CHECK(max_entry_dev > 0.0);
    CHECK(max_entry_dev < 10.0 * sigma);
    CHECK(noisy.truth.note.find("noiseless") != std::string::npos);
}

TEST_CASE("unseparated pairs are flagged when L is small") {
    auto prob = gen_near_diagonalizable(6, 2, 0.0, 5);
    CHECK_FALSE(*prob.truth.regularity_expected);
    CHECK(prob.truth.note.find("not separated") != std::string::npos);

    // The planted point is still stationary, but tail pairs have singular
    // second-order blocks.
    auto state = rotate_full(prob.cost, *prob.truth.U_star);
    auto report = regularity_check(prob.cost, state);
    CHECK(report.gradient_small);
    int singular = 0;
    for (const auto& pr : report.pairs) singular += pr.singular ? 1 : 0;
    CHECK(singular == 6);  // pairs within {2,..,5}: C(4,2)
    CHECK(report.rank_estimate == 2 * 9);

    CHECK_THROWS_AS(gen_near_diagonalizable(4, 5, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(gen_near_diagonalizable(4, 2, -1.0, 1), std::invalid_argument);
}

TEST_CASE("diagonal order-3 generator plants an exact optimum") {
    std::vector<cplx> diag{cplx(1.5, 0.5), cplx(-0.7, 1.1), cplx(2.0, 0.0),
                           cplx(0.0, -1.3)};
    auto prob = gen_diagonal_tensor3(4, diag, 99, true);
    double want = 0.0;
    for (auto d : diag) want += std::norm(d);
    CHECK(*prob.truth.f_star == doctest::Approx(want));
    CHECK(evaluate(prob.cost, *prob.truth.U_star) == doctest::Approx(want).epsilon(1e-10));
    auto state = rotate_full(prob.cost, *prob.truth.U_star);
    CHECK(state.lambda.norm() < 1e-10);
    CHECK(*prob.truth.regularity_expected);

    SolverConfig config;
    config.grad_tol = 1e-9;
    auto res = jacobi_g_solve(prob.cost, Eigen::MatrixXcd::Identity(4, 4), config);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.f_final == doctest::Approx(want).epsilon(1e-8));
}

TEST_CASE("unrotated diagonal order-3 problem is already solved") {
    std::vector<cplx> diag{cplx(1.0), cplx(2.0), cplx(3.0)};
    auto prob = gen_diagonal_tensor3(3, diag, 0, false);
    CHECK((*prob.truth.U_star - Eigen::MatrixXcd::Identity(3, 3)).norm() == 0.0);
    auto state = rotate_full(prob.cost, Eigen::MatrixXcd::Identity(3, 3));
    CHECK(state.lambda.norm() == 0.0);
    CHECK(state.f_value == doctest::Approx(14.0));

    std::vector<cplx> two_zero{cplx(0.0), cplx(0.0), cplx(3.0)};
    auto degen = gen_diagonal_tensor3(3, two_zero, 0, false);
    CHECK_FALSE(*degen.truth.regularity_expected);

    CHECK_THROWS_AS(gen_diagonal_tensor3(4, diag, 0), std::invalid_argument);
}

TEST_CASE("diagonal trace-form generator plants an exact optimum") {
    std::vector<double> diag{2.0, 1.0, 0.5, 1.5};
    auto prob = gen_diagonal_trace4(4, diag, 17, true);
    CHECK(*prob.truth.f_star == doctest::Approx(5.0));
    CHECK(evaluate(prob.cost, *prob.truth.U_star) == doctest::Approx(5.0).epsilon(1e-10));
    auto state = rotate_full(prob.cost, *prob.truth.U_star);
    CHECK(state.lambda.norm() < 1e-10);
    CHECK(*prob.truth.regularity_expected);

    // Planted point second-order blocks match the closed form -(d_i+d_j) I.
    auto G = build_gamma(prob.cost, state, IndexPair(0, 1));
    auto H = hessian_block(G);
    CHECK(H(0, 0) == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(H(1, 1) == doctest::Approx(-3.0).epsilon(1e-8));
    CHECK(std::abs(H(0, 1)) < 1e-8);

    SolverConfig config;
    config.grad_tol = 1e-9;
    auto res = jacobi_g_solve(prob.cost, Eigen::MatrixXcd::Identity(4, 4), config);
    CHECK(res.status == SolveStatus::Converged);
    CHECK(res.f_final == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("trace-form regularity flag follows the pairwise sum condition") {
    // One mildly negative entry, all pairwise sums positive: still regular.
    auto ok = gen_diagonal_trace4(3, {2.0, 1.5, -0.4}, 3, false);
    CHECK(*ok.truth.regularity_expected);

    // Two entries summing below zero: flagged.
    auto bad = gen_diagonal_trace4(3, {2.0, 0.3, -0.4}, 3, false);
    CHECK_FALSE(*bad.truth.regularity_expected);
    CHECK(bad.truth.note.find("nonpositive") != std::string::npos);

    CHECK_THROWS_AS(gen_diagonal_trace4(2, {1.0, 2.0, 3.0}, 0), std::invalid_argument);
}

TEST_CASE("generators are reproducible across calls") {
    auto a = gen_near_diagonalizable(5, 4, 1e-6, 123);
    auto b = gen_near_diagonalizable(5, 4, 1e-6, 123);
    for (std::size_t l = 0; l < 4; ++l)
        for (std::size_t flat = 0; flat < a.cost.terms()[l].tensor.size(); ++flat)
            CHECK(a.cost.terms()[l].tensor[flat] == b.cost.terms()[l].tensor[flat]);
    CHECK((*a.truth.U_star - *b.truth.U_star).norm() == 0.0);

    auto t1 = gen_diagonal_tensor3(4, {cplx(1), cplx(2), cplx(3), cplx(4)}, 9, true);
    auto t2 = gen_diagonal_tensor3(4, {cplx(1), cplx(2), cplx(3), cplx(4)}, 9, true);
    for (std::size_t flat = 0; flat < t1.cost.terms()[0].tensor.size(); ++flat)
        CHECK(t1.cost.terms()[0].tensor[flat] == t2.cost.terms()[0].tensor[flat]);
}
