#include "unijadi/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace unijadi {

namespace {

Eigen::MatrixXcd gaussian_matrix(int rows, int cols, CounterRng& rng, double sigma) {
    Eigen::MatrixXcd M(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) M(i, j) = rng.complex_gaussian(sigma);
    return M;
}

}  // namespace

Eigen::MatrixXcd haar_unitary(int n, CounterRng& rng) {
    if (n < 1) throw std::invalid_argument("haar_unitary: n must be positive");
    const Eigen::MatrixXcd A = gaussian_matrix(n, n, rng, 1.0);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(A);
    Eigen::MatrixXcd Q = qr.householderQ();
    const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the gauge so the implied R diagonal is real positive; without this
    // the distribution would depend on the QR implementation, not be Haar.
    for (int k = 0; k < n; ++k) {
        const cplx r = R(k, k);
        const double mag = std::abs(r);
        Q.col(k) *= mag > 0.0 ? r / mag : cplx(1.0);
    }
    return Q;
}

GeneratedProblem gen_random_joint_matrices(int n, int L, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_random_joint_matrices: n must be >= 2");
    if (L < 1) throw std::invalid_argument("gen_random_joint_matrices: L must be >= 1");
    CounterRng rng(seed, 0x6a6d6174u);
    std::vector<SquaredTerm> terms;
    terms.reserve(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) {
        Eigen::MatrixXcd A(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = cplx(rng.uniform01(), rng.uniform01());
        terms.push_back({ComplexDenseTensor::from_matrix(A), 1, 1.0});
    }
    GeneratedProblem prob{CostFunction::squared_moduli(n, std::move(terms)), {}};
    prob.truth.note = "generic matrices, no planted optimum";
    return prob;
}

GeneratedProblem gen_near_diagonalizable(int n, int L, double noise_sigma,
                                         std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_near_diagonalizable: n must be >= 2");
    if (L < 1 || L > n)
        throw std::invalid_argument("gen_near_diagonalizable: need 1 <= L <= n");
    if (noise_sigma < 0.0)
        throw std::invalid_argument("gen_near_diagonalizable: negative noise");

    CounterRng rng(seed, 0x6e646961u);
    const Eigen::MatrixXcd Q = haar_unitary(n, rng);

    std::vector<SquaredTerm> terms;
    std::vector<std::vector<double>> spectra;
    double f_star = 0.0;
    for (int l = 0; l < L; ++l) {
        Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);
        diag(l) = 2.0;
        spectra.emplace_back(diag.data(), diag.data() + n);
        f_star += diag.squaredNorm();
        Eigen::MatrixXcd A = Q.adjoint() * diag.asDiagonal() * Q;
        if (noise_sigma > 0.0) A += gaussian_matrix(n, n, rng, noise_sigma);
        terms.push_back({ComplexDenseTensor::from_matrix(A), 1, 1.0});
    }

    // A pair is separated when some spectrum differs on it; with this D
    // pattern that fails exactly for pairs lying entirely in the untouched
    // tail l >= L.
    const bool all_separated = L >= n - 1;

    GeneratedProblem prob{CostFunction::squared_moduli(n, std::move(terms)), {}};
    prob.truth.U_star = Q.adjoint();
    prob.truth.f_star = f_star;
    prob.truth.spectra = std::move(spectra);
    prob.truth.regularity_expected = all_separated;
    prob.truth.note = all_separated
                          ? (noise_sigma > 0.0
                                 ? "truth refers to the noiseless part of the family"
                                 : "exactly jointly diagonalizable")
                          : "pairs with both indices >= L are not separated by any "
                            "spectrum; expect singular pair blocks there";
    return prob;
}

GeneratedProblem gen_diagonal_tensor3(int n, const std::vector<cplx>& diag_values,
                                      std::uint64_t seed, bool rotate) {
    if (static_cast<int>(diag_values.size()) != n)
        throw std::invalid_argument("gen_diagonal_tensor3: diagonal length must equal n");
    if (n < 2) throw std::invalid_argument("gen_diagonal_tensor3: n must be >= 2");

    ComplexDenseTensor D({n, n, n});
    double f_star = 0.0;
    int zeros = 0;
    std::vector<double> moduli;
    for (int p = 0; p < n; ++p) {
        D.at({p, p, p}) = diag_values[static_cast<std::size_t>(p)];
        const double m2 = std::norm(diag_values[static_cast<std::size_t>(p)]);
        f_star += m2;
        moduli.push_back(std::sqrt(m2));
        if (m2 == 0.0) ++zeros;
    }

    Eigen::MatrixXcd U_star = Eigen::MatrixXcd::Identity(n, n);
    ComplexDenseTensor A = std::move(D);
    if (rotate) {
        CounterRng rng(seed, 0x74337274u);
        U_star = haar_unitary(n, rng);
        A = contract_matrix(A, 0, U_star, false);
        A = contract_matrix(A, 1, U_star, true);
        A = contract_matrix(A, 2, U_star, true);
    }

    std::vector<SquaredTerm> terms{{std::move(A), 1, 1.0}};
    GeneratedProblem prob{CostFunction::squared_moduli(n, std::move(terms)), {}};
    prob.truth.U_star = U_star;
    prob.truth.f_star = f_star;
    prob.truth.spectra = std::vector<std::vector<double>>{std::move(moduli)};
    prob.truth.regularity_expected = zeros <= 1;
    prob.truth.note = zeros <= 1 ? "diagonal moduli stored as the spectrum"
                                 : "two or more zero diagonal entries; the pair blocks "
                                   "joining them are singular";
    return prob;
}

GeneratedProblem gen_diagonal_trace4(int n, const std::vector<double>& diag_values,
                                     std::uint64_t seed, bool rotate) {
    if (static_cast<int>(diag_values.size()) != n)
        throw std::invalid_argument("gen_diagonal_trace4: diagonal length must equal n");
    if (n < 2) throw std::invalid_argument("gen_diagonal_trace4: n must be >= 2");

    ComplexDenseTensor D({n, n, n, n});
    double f_star = 0.0;
    for (int p = 0; p < n; ++p) {
        D.at({p, p, p, p}) = diag_values[static_cast<std::size_t>(p)];
        f_star += diag_values[static_cast<std::size_t>(p)];
    }

    Eigen::MatrixXcd U_star = Eigen::MatrixXcd::Identity(n, n);
    ComplexDenseTensor B = std::move(D);
    if (rotate) {
        CounterRng rng(seed, 0x74347274u);
        U_star = haar_unitary(n, rng);
        B = contract_matrix(B, 0, U_star, false);
        B = contract_matrix(B, 1, U_star, false);
        B = contract_matrix(B, 2, U_star, true);
        B = contract_matrix(B, 3, U_star, true);
    }

    // Every stationary pair block is -(d_i + d_j) I: regular iff all pairwise
    // sums are positive, i.e. the two smallest values sum above zero.
    std::vector<double> sorted(diag_values);
    std::sort(sorted.begin(), sorted.end());
    const bool regular = sorted[0] + sorted[1] > 0.0;

    GeneratedProblem prob{CostFunction::trace_form(n, std::move(B), 2), {}};
    prob.truth.U_star = U_star;
    prob.truth.f_star = f_star;
    prob.truth.spectra = std::vector<std::vector<double>>{diag_values};
    prob.truth.regularity_expected = regular;
    prob.truth.note = regular ? "all pairwise diagonal sums positive"
                              : "some pairwise diagonal sum is nonpositive; the planted "
                                "point is not a regular maximum";
    return prob;
}

}  // namespace unijadi
