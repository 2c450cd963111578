#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "unijadi/cost.hpp"
#include "unijadi/solver.hpp"

namespace unijadi {

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::vector<double> per_direction;
};

// Compare the analytic directional derivative Re tr(Omega^H lambda) against
// a central finite difference of f(U exp(t Omega)) over random horizontal
// directions. Relative to max(1, |analytic|, |numeric|).
GradCheckResult finite_diff_gradient_check(const CostFunction& cost,
                                           const Eigen::MatrixXcd& U,
                                           int num_directions,
                                           double step = 1e-5,
                                           std::uint64_t seed = 0);

struct PairRegularity {
    IndexPair pair;
    double gap = 0.0;                  // leading eigenvalue gap of the form
    Eigen::Vector2d hessian_eigs = Eigen::Vector2d::Zero();
    bool negative_definite = false;
    bool singular = false;
};

struct RegularityReport {
    std::vector<PairRegularity> pairs;
    int rank_estimate = 0;             // 2 * number of nonsingular blocks
    bool gradient_small = true;        // ||lambda|| <= 1e-6 at the probe point
    bool near_diagonal = true;         // off-diagonal energy small
};

// Per-pair second-order picture at (ideally) a stationary point: Hessian
// blocks, negative-definiteness and singularity flags. Still computed when
// the gradient is not small, with gradient_small cleared as a caveat.
RegularityReport regularity_check(const CostFunction& cost, const RotatedState& state,
                                  double singular_tol = 1e-8);

struct RateEstimate {
    double rho = 0.0;          // median tail ratio of successive grad norms
    double log_slope = 0.0;    // least-squares slope of ln(grad) vs iteration
    double tail_fraction = 0.5;
    double residual = 0.0;     // RMS fit residual, log10 units
    bool linear = false;       // rho < 1 and residual < 0.5
};

// Fit a geometric decay to the tail of the gradient-norm trace. Requires at
// least 20 records with the final gradient below the initial one.
RateEstimate convergence_rate_fit(const std::vector<IterationRecord>& trace,
                                  double tail_fraction = 0.5);

enum class DiagonalFamily { Matrices, Tensor3, Trace4 };

struct HessianCheckResult {
    bool pass = false;
    Eigen::Matrix2d numeric = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d closed_form = Eigen::Matrix2d::Zero();
    double max_abs_dev = 0.0;
};

// At a fully diagonal stationary point the pair Hessian blocks have short
// closed forms (matrices: -sum_l (mu_i - mu_j)^2 I; third order:
// -(3/2)(|d_i|^2 + |d_j|^2) I; fourth-order trace: -(d_i + d_j) I). Build
// the diagonal problem, compute the block numerically and compare.
HessianCheckResult hessian_closed_form_check(DiagonalFamily family,
                                             const std::vector<std::vector<cplx>>& spectra,
                                             IndexPair pair, double tol = 1e-8);

struct InvarianceResult {
    double max_f_dev = 0.0;
    double max_grad_dev = 0.0;
    bool pass = false;
};

// Column-phase invariance: f(U S) == f(U) and the full gradients satisfy
// Grad(U S) == Grad(U) S for random unit-modulus diagonals S.
InvarianceResult invariance_check(const CostFunction& cost, const Eigen::MatrixXcd& U,
                                  int trials, std::uint64_t seed);

}  // namespace unijadi
