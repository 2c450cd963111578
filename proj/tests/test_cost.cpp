#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "unijadi/cost.hpp"
#include "unijadi/rotations.hpp"

using namespace unijadi;

namespace {

// L random matrices as a joint-diagonalization cost (order 2, left slot
// conjugated).
CostFunction random_matrix_cost(int n, int L, unsigned seed) {
    std::vector<SquaredTerm> terms;
    for (int l = 0; l < L; ++l)
        terms.push_back({ComplexDenseTensor::from_matrix(
                             oracle::random_complex_matrix(n, n, seed + 13 * l)),
                         1, 1.0});
    return CostFunction::squared_moduli(n, std::move(terms));
}

CostFunction random_tensor3_cost(int n, unsigned seed) {
    std::vector<SquaredTerm> terms;
    terms.push_back({oracle::random_tensor({n, n, n}, seed), 1, 1.0});
    return CostFunction::squared_moduli(n, std::move(terms));
}

CostFunction random_trace4_cost(int n, unsigned seed) {
    // Hermitian order-4 tensor via squaring a random matrix.
    auto B = tensor_square_to_hermitian(oracle::random_tensor({n, n}, seed), 1);
    return CostFunction::trace_form(n, B, 2);
}

GivensRotation rotation_from_angles(double theta, double phi) {
    GivensRotation rot;
    rot.c = std::cos(theta);
    rot.s1 = std::sin(theta) * std::cos(phi);
    rot.s2 = std::sin(theta) * std::sin(phi);
    return rot;
}

}  // namespace

TEST_CASE("constructors validate and normalize") {
    // Non-Hermitian trace tensor is rejected.
    ComplexDenseTensor bad({2, 2}, {cplx(0), cplx(0, 1), cplx(0, 1), cplx(0)});
    CHECK_THROWS_AS(CostFunction::trace_form(2, bad, 1), std::invalid_argument);

    // Half-order 3 trace forms are rejected outright.
    CHECK_THROWS_AS(CostFunction::trace_form(2, oracle::random_tensor({2, 2, 2, 2, 2, 2}, 1), 3),
                    std::invalid_argument);

    // Squared terms above order 3 are rejected.
    std::vector<SquaredTerm> terms;
    terms.push_back({oracle::random_tensor({2, 2, 2, 2}, 2), 2, 1.0});
    CHECK_THROWS_AS(CostFunction::squared_moduli(2, std::move(terms)), std::invalid_argument);

    // Stored tensors come out half-symmetrized, value unchanged.
    auto A = oracle::random_tensor({3, 3, 3}, 3);
    std::vector<SquaredTerm> t2;
    t2.push_back({A, 1, 2.0});
    auto cost = CostFunction::squared_moduli(3, std::move(t2));
    auto S = semi_symmetrize(A, 1);
    for (std::size_t k = 0; k < S.size(); ++k)
        CHECK(std::abs(cost.terms()[0].tensor[k] - S[k]) < 1e-15);
}

TEST_CASE("evaluate matches the enumeration oracle and rejects non-unitary U") {
    auto cost = random_matrix_cost(4, 2, 17);
    auto U = oracle::random_unitary(4, 5);
    CHECK(evaluate(cost, U) == doctest::Approx(oracle::cost_value(cost, U)).epsilon(1e-12));

    auto cost3 = random_tensor3_cost(3, 23);
    auto U3 = oracle::random_unitary(3, 6);
    CHECK(evaluate(cost3, U3) == doctest::Approx(oracle::cost_value(cost3, U3)).epsilon(1e-12));

    auto cost4 = random_trace4_cost(3, 29);
    auto U4 = oracle::random_unitary(3, 7);
    CHECK(evaluate(cost4, U4) == doctest::Approx(oracle::cost_value(cost4, U4)).epsilon(1e-12));

    Eigen::MatrixXcd notU = Eigen::MatrixXcd::Ones(4, 4);
    CHECK_THROWS_AS(evaluate(cost, notU), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(cost, oracle::random_unitary(3, 8)), std::invalid_argument);
}

TEST_CASE("evaluate of a Hermitian 2x2 at its eigenbasis hits the eigenvalue mass") {
    // A = [[1,1],[1,0]]: eigenvalues (1 +- sqrt(5))/2, so the diagonalized
    // value is their squared sum = 3.
    ComplexDenseTensor A({2, 2}, {cplx(1), cplx(1), cplx(1), cplx(0)});
    std::vector<SquaredTerm> terms{{A, 1, 1.0}};
    auto cost = CostFunction::squared_moduli(2, std::move(terms));

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(A.as_matrix());
    Eigen::MatrixXcd V = es.eigenvectors();
    CHECK(evaluate(cost, V) == doctest::Approx(3.0).epsilon(1e-12));
    // At the identity only the diagonal contributes: 1^2 + 0^2.
    CHECK(evaluate(cost, Eigen::MatrixXcd::Identity(2, 2)) == doctest::Approx(1.0));
}

TEST_CASE("rotate_full produces U^H A U for matrix terms and a consistent state") {
    auto cost = random_matrix_cost(4, 3, 31);
    auto U = oracle::random_unitary(4, 9);
    auto state = rotate_full(cost, U);

    for (int l = 0; l < 3; ++l) {
        Eigen::MatrixXcd A = cost.terms()[l].tensor.as_matrix();
        Eigen::MatrixXcd want = U.adjoint() * A * U;
        CHECK((state.rotated[l].as_matrix() - want).norm() < 1e-12);
    }
    CHECK(state.f_value == doctest::Approx(evaluate(cost, U)).epsilon(1e-12));
    CHECK(state.lambda.rows() == 4);
}

TEST_CASE("rotate_full diagonal entries equal per-column forms for tensors") {
    auto cost = random_tensor3_cost(4, 37);
    auto U = oracle::random_unitary(4, 10);
    auto state = rotate_full(cost, U);
    for (int p = 0; p < 4; ++p) {
        cplx w = state.rotated[0].diagonal_entry(p);
        cplx want = oracle::form_value(cost.terms()[0].tensor, 1, U.col(p));
        CHECK(std::abs(w - want) < 1e-12);
    }
}

TEST_CASE("lambda matches the finite-difference oracle") {
    struct Case {
        CostFunction cost;
        unsigned useed;
    };
    std::vector<Case> cases;
    cases.push_back({random_matrix_cost(3, 2, 41), 11u});
    cases.push_back({random_tensor3_cost(3, 43), 12u});
    cases.push_back({random_trace4_cost(3, 47), 13u});
    // Mixed orders in one cost, including a constant order-1 term.
    {
        std::vector<SquaredTerm> terms;
        terms.push_back({oracle::random_tensor({3}, 53), 0, 0.7});
        terms.push_back({ComplexDenseTensor::from_matrix(oracle::random_complex_matrix(3, 3, 59)),
                         1, 1.3});
        terms.push_back({oracle::random_tensor({3, 3, 3}, 61), 2, 0.5});
        cases.push_back({CostFunction::squared_moduli(3, std::move(terms)), 14u});
    }

    for (const auto& cs : cases) {
        auto U = oracle::random_unitary(3, cs.useed);
        auto state = rotate_full(cs.cost, U);
        auto fd = oracle::lambda_fd(cs.cost, U);
        CHECK((state.lambda - fd).cwiseAbs().maxCoeff() < 1e-7);
        // Skew-Hermitian with a zero diagonal.
        CHECK((state.lambda + state.lambda.adjoint()).norm() < 1e-12);
        CHECK(state.lambda.diagonal().norm() == 0.0);
    }
}

TEST_CASE("lambda is zero on diagonalized problems and at the known saddle") {
    ComplexDenseTensor D({2, 2}, {cplx(2), cplx(0), cplx(0), cplx(1)});
    std::vector<SquaredTerm> terms{{D, 1, 1.0}};
    auto cost = CostFunction::squared_moduli(2, std::move(terms));
    auto state = rotate_full(cost, Eigen::MatrixXcd::Identity(2, 2));
    CHECK(state.lambda.norm() == 0.0);

    // Off-diagonal symmetric matrix: gradient vanishes at the identity even
    // though it is not a maximizer.
    ComplexDenseTensor X({2, 2}, {cplx(0), cplx(1), cplx(1), cplx(0)});
    std::vector<SquaredTerm> t2{{X, 1, 1.0}};
    auto saddle = CostFunction::squared_moduli(2, std::move(t2));
    auto sstate = rotate_full(saddle, Eigen::MatrixXcd::Identity(2, 2));
    CHECK(sstate.lambda.norm() == 0.0);
}

TEST_CASE("apply_givens_update equals a full rotation of U G") {
    for (unsigned seed : {1u, 2u}) {
        auto cost = random_matrix_cost(5, 2, 70 + seed);
        auto U = oracle::random_unitary(5, 80 + seed);
        auto state = rotate_full(cost, U);

        IndexPair pair(1, 3);
        auto rot = rotation_from_angles(0.4, 1.1);
        apply_givens_update(cost, state, pair, rot);
        lambda_incremental_update(cost, state, pair);

        Eigen::MatrixXcd G = oracle::embed_rotation(5, pair, rot.c, rot.s1, rot.s2);
        auto fresh = rotate_full(cost, U * G);
        CHECK((state.U - U * G).norm() < 1e-13);
        for (int l = 0; l < 2; ++l)
            CHECK((state.rotated[l].as_matrix() - fresh.rotated[l].as_matrix()).norm() < 1e-12);
        CHECK(state.f_value == doctest::Approx(fresh.f_value).epsilon(1e-12));
        CHECK((state.lambda - fresh.lambda).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("apply_givens_update matches rotate_full for order-3 and trace kinds") {
    auto cost3 = random_tensor3_cost(4, 91);
    auto cost4 = random_trace4_cost(4, 93);
    for (const CostFunction* cost : {&cost3, &cost4}) {
        auto U = oracle::random_unitary(4, 95);
        auto state = rotate_full(*cost, U);
        IndexPair pair(0, 2);
        auto rot = rotation_from_angles(0.7, -0.3);
        apply_givens_update(*cost, state, pair, rot);
        lambda_incremental_update(*cost, state, pair);

        Eigen::MatrixXcd G = oracle::embed_rotation(4, pair, rot.c, rot.s1, rot.s2);
        auto fresh = rotate_full(*cost, U * G);
        double worst = 0.0;
        for (std::size_t k = 0; k < state.rotated[0].size(); ++k)
            worst = std::max(worst, std::abs(state.rotated[0][k] - fresh.rotated[0][k]));
        CHECK(worst < 1e-12);
        CHECK((state.lambda - fresh.lambda).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(state.f_value == doctest::Approx(fresh.f_value).epsilon(1e-12));
    }
}

TEST_CASE("apply_givens_update rejects off-sphere parameters") {
    auto cost = random_matrix_cost(3, 1, 101);
    auto state = rotate_full(cost, Eigen::MatrixXcd::Identity(3, 3));
    GivensRotation bad{0.9, 0.9, 0.0};
    CHECK_THROWS_AS(apply_givens_update(cost, state, IndexPair(0, 1), bad),
                    std::invalid_argument);
}

TEST_CASE("incremental lambda stays glued to the full recomputation over many rotations") {
    auto cost = random_matrix_cost(6, 2, 103);
    auto state = rotate_full(cost, Eigen::MatrixXcd::Identity(6, 6));
    std::mt19937 gen(7);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_real_distribution<double> ang(-0.6, 0.6);
    for (int k = 0; k < 200; ++k) {
        int a = pick(gen), b = pick(gen);
        if (a == b) continue;
        IndexPair pair(std::min(a, b), std::max(a, b));
        apply_givens_update(cost, state, pair, rotation_from_angles(ang(gen), ang(gen) * 3));
        lambda_incremental_update(cost, state, pair);
    }
    CHECK((state.lambda - lambda_matrix(cost, state)).cwiseAbs().maxCoeff() < 1e-12);
    auto fresh = rotate_full(cost, state.U);
    CHECK((state.lambda - fresh.lambda).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("scale_columns keeps f and conjugates the gradient") {
    auto cost = random_tensor3_cost(4, 107);
    auto U = oracle::random_unitary(4, 109);
    auto state = rotate_full(cost, U);
    const double f0 = state.f_value;
    const Eigen::MatrixXcd lam0 = state.lambda;

    DiagonalPhase phase;
    phase.z = Eigen::VectorXcd(4);
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> th(0, 2 * M_PI);
    for (int p = 0; p < 4; ++p) phase.z(p) = std::polar(1.0, th(gen));

    scale_columns(cost, state, phase);
    CHECK(state.f_value == doctest::Approx(f0).epsilon(1e-12));

    // Rebuild from scratch at U S and compare everything.
    auto fresh = rotate_full(cost, U * phase.z.asDiagonal());
    CHECK((state.U - fresh.U).norm() < 1e-13);
    CHECK((state.lambda - fresh.lambda).cwiseAbs().maxCoeff() < 1e-11);
    // Gradient relation: lambda(US) = S^H lambda(U) S.
    Eigen::MatrixXcd want =
        phase.z.asDiagonal().inverse() * lam0 * phase.z.asDiagonal();
    CHECK((fresh.lambda - want).cwiseAbs().maxCoeff() < 1e-11);

    DiagonalPhase bad;
    bad.z = Eigen::VectorXcd::Constant(4, cplx(2.0, 0.0));
    CHECK_THROWS_AS(scale_columns(cost, state, bad), std::invalid_argument);
}

TEST_CASE("refresh policy restores orthonormality and rebuilds the state") {
    auto cost = random_matrix_cost(4, 1, 113);
    auto state = rotate_full(cost, oracle::random_unitary(4, 115));
    RefreshPolicy policy;
    policy.interval = 5;
    CHECK_FALSE(maybe_refresh(cost, state, policy));
    state.rotations_since_refresh = 5;
    CHECK(maybe_refresh(cost, state, policy));
    CHECK(state.rotations_since_refresh == 0);
    CHECK(unitarity_drift(state.U) < 1e-13);

    // Drift trigger: perturb U slightly.
    state.U(0, 0) += 1e-6;
    CHECK(maybe_refresh(cost, state, policy));
    CHECK(unitarity_drift(state.U) < 1e-13);
}

TEST_CASE("directional derivative identity ties lambda to the cost") {
    // d/dt f(U exp(t Om)) at 0 equals Re tr(Om^H lambda) for horizontal Om.
    auto cost = random_trace4_cost(3, 117);
    auto U = oracle::random_unitary(3, 119);
    auto state = rotate_full(cost, U);
    auto fd = oracle::lambda_fd(cost, U);
    CHECK((state.lambda - fd).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("squared term equals the trace form of its square (order <= 2)") {
    auto A = oracle::random_complex_matrix(3, 3, 121);
    std::vector<SquaredTerm> terms{{ComplexDenseTensor::from_matrix(A), 1, 1.0}};
    auto squared = CostFunction::squared_moduli(3, std::move(terms));
    auto traced = CostFunction::trace_form(
        3, tensor_square_to_hermitian(ComplexDenseTensor::from_matrix(A), 1), 2);
    for (unsigned s : {1u, 2u, 3u}) {
        auto U = oracle::random_unitary(3, 130 + s);
        CHECK(evaluate(squared, U) == doctest::Approx(evaluate(traced, U)).epsilon(1e-11));
        auto st1 = rotate_full(squared, U);
        auto st2 = rotate_full(traced, U);
        CHECK((st1.lambda - st2.lambda).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("off_diagonal_energy vanishes exactly on diagonalized states") {
    ComplexDenseTensor D({3, 3});
    D.at({0, 0}) = 2.0;
    D.at({1, 1}) = 1.0;
    D.at({2, 2}) = -1.0;
    std::vector<SquaredTerm> terms{{D, 1, 1.0}};
    auto cost = CostFunction::squared_moduli(3, std::move(terms));
    auto state = rotate_full(cost, Eigen::MatrixXcd::Identity(3, 3));
    CHECK(off_diagonal_energy(cost, state) == 0.0);

    auto rotated = rotate_full(cost, oracle::random_unitary(3, 140));
    CHECK(off_diagonal_energy(cost, rotated) > 1e-3);
}
