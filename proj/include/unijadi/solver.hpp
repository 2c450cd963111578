#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "unijadi/cost.hpp"
#include "unijadi/rotations.hpp"

namespace unijadi {

enum class StrategyKind { GradientMax, CyclicThreshold, PureCyclic, SteepestDescent };

struct PairStrategy {
    StrategyKind kind = StrategyKind::GradientMax;
    // Threshold factor for CyclicThreshold; <= 0 means the default
    // 0.1 * sqrt(2) / n picked at solve time.
    double delta = 0.0;
};

struct SolverConfig {
    PairStrategy strategy;
    double grad_tol = 1e-8;
    int max_sweeps = 200;
    // Scaled by (1 + |f|) at use; gains below it are treated as zero.
    double rotation_skip_tol = 1e-14;
    RefreshPolicy refresh;
    std::uint64_t seed = 0;
};

enum class SolveStatus { Converged, MaxSweeps, StalledAtSaddle };

struct IterationRecord {
    long iter = 0;
    int sweep = 0;
    int i = 0;
    int j = 0;
    double f = 0.0;
    double grad_norm = 0.0;
    GivensRotation rot;
    double gamma_gap = 0.0;   // leading eigenvalue gap of the pair's form
    double elapsed_s = 0.0;
};

struct SolveResult {
    Eigen::MatrixXcd U_final;
    double f_final = 0.0;
    double grad_norm_final = 0.0;
    SolveStatus status = SolveStatus::Converged;
    std::vector<IterationRecord> trace;
    long iterations = 0;
    int sweeps = 0;
    // Set when status == StalledAtSaddle: a pair whose exact rotation still
    // improves the cost although the gradient is below tolerance.
    std::optional<IndexPair> stalled_pair;
};

struct PairSelection {
    IndexPair pair;
    bool grad_zero = false;  // the whole off-diagonal was exactly zero
};

// Pair with the largest |lambda_ij|, lexicographic tie-break.
PairSelection select_pair_gradient_max(const Eigen::MatrixXcd& lambda);

// Row-major cyclic walk over pairs (0,1), (0,2), ..., (n-2,n-1), wrapping
// around; persists across sweeps.
struct PairCursor {
    int i = 0;
    int j = 1;

    IndexPair current() const { return {i, j}; }
    void advance(int n);
};

// Advance the cursor until sqrt(2)|lambda_ij| >= delta ||lambda||_F and
// return that pair (cursor left one past it). For delta <= sqrt(2)/n a
// qualifying pair exists within one cycle whenever lambda != 0; a zero
// lambda returns nothing.
std::optional<IndexPair> select_pair_cyclic_threshold(const Eigen::MatrixXcd& lambda,
                                                      PairCursor& cursor, double delta);

// Gradient-driven plane-rotation ascent (strategy GradientMax or
// CyclicThreshold). Stops with Converged once ||lambda||_F <= grad_tol and
// no pair's exact rotation improves the cost beyond tolerance, with
// StalledAtSaddle when such a pair exists, or with MaxSweeps.
SolveResult jacobi_g_solve(const CostFunction& cost, const Eigen::MatrixXcd& U0,
                           const SolverConfig& config);

// Plain cyclic sweeps over all pairs, rotating whenever the exact rotation
// gains more than the skip tolerance. No stationarity guarantee; stops after
// a sweep with no applied rotation (or on the sweep budget).
SolveResult jacobi_cyclic_solve(const CostFunction& cost, const Eigen::MatrixXcd& U0,
                                const SolverConfig& config);

// Riemannian gradient ascent with Armijo backtracking (start step 1, halve,
// sufficient-increase coefficient 1e-4) and polar retraction. Budget:
// max_sweeps * n(n-1)/2 gradient steps.
SolveResult steepest_descent_solve(const CostFunction& cost, const Eigen::MatrixXcd& U0,
                                   const SolverConfig& config);

}  // namespace unijadi
