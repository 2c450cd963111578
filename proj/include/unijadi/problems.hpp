#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "unijadi/cost.hpp"
#include "unijadi/prng.hpp"

namespace unijadi {

struct GroundTruth {
    std::optional<Eigen::MatrixXcd> U_star;
    std::optional<double> f_star;
    std::optional<std::vector<std::vector<double>>> spectra;
    std::optional<bool> regularity_expected;
    std::string note;
};

struct GeneratedProblem {
    CostFunction cost;
    GroundTruth truth;
};

// Haar-distributed unitary: QR of a complex Gaussian matrix with the R
// diagonal phase-fixed to be real positive.
Eigen::MatrixXcd haar_unitary(int n, CounterRng& rng);

// L generic n x n matrices, each entry with real and imaginary parts i.i.d.
// uniform on [0, 1] (not Hermitian). No ground truth.
GeneratedProblem gen_random_joint_matrices(int n, int L, std::uint64_t seed);

// Jointly diagonalizable family: A_l = Q^H D_l Q + E_l with D_l the identity
// except a 2 at slot l, Q Haar, and E_l complex Gaussian noise of
// componentwise std noise_sigma. Requires L <= n. U_star = Q^H; at zero
// noise f_star = L (n + 3). With L < n pairs not split by any D_l are noted.
GeneratedProblem gen_near_diagonalizable(int n, int L, double noise_sigma,
                                         std::uint64_t seed);

// Order-3 problem whose rotated tensor is exactly diag(d) at U_star: the
// diagonal tensor contracted by a Haar Q (or left unrotated when rotate is
// false, making U_star the identity). f_star = sum |d_p|^2.
GeneratedProblem gen_diagonal_tensor3(int n, const std::vector<cplx>& diag_values,
                                      std::uint64_t seed, bool rotate = true);

// Order-4 trace-form problem, diagonal d (real) at U_star. f_star = sum d_p.
// Ground truth records whether the diagonal satisfies one of the two sign
// conditions that make every stationary Hessian block nonsingular.
GeneratedProblem gen_diagonal_trace4(int n, const std::vector<double>& diag_values,
                                     std::uint64_t seed, bool rotate = true);

}  // namespace unijadi
