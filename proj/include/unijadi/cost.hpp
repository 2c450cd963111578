#pragma once

#include <vector>

#include <Eigen/Dense>

#include "unijadi/tensor.hpp"

namespace unijadi {

struct GivensRotation;  // rotations.hpp

// One |form|^2 summand: alpha * sum_p |<A, u_p x ... >|^2 where the form
// conjugates u in the first t slots. Tensors are stored semi-symmetrized
// (t / order - t), which leaves the cost value unchanged.
struct SquaredTerm {
    ComplexDenseTensor tensor;
    int t = 0;
    double alpha = 1.0;
};

enum class CostKind { SquaredModuli, TraceForm };

// Either a weighted sum of squared multilinear forms over the columns of U
// (orders 1..3) or a real trace form sum_p B(u_p..., u_p...) for a Hermitian
// order-2d tensor B with d in {1, 2}. Higher trace orders are rejected; route
// them through the squared-moduli representation instead.
class CostFunction {
public:
    static CostFunction squared_moduli(int n, std::vector<SquaredTerm> terms);
    static CostFunction trace_form(int n, ComplexDenseTensor B, int half_order,
                                   double hermitian_tol = 1e-10);

    CostKind kind() const { return kind_; }
    int n() const { return n_; }

    const std::vector<SquaredTerm>& terms() const;
    const ComplexDenseTensor& trace_tensor() const;
    int trace_half_order() const;

    // Largest half-order d over the summands (a squared term of order d
    // behaves like a trace form of order 2d on the pair restriction).
    int max_half_order() const;

private:
    CostFunction() = default;

    CostKind kind_ = CostKind::SquaredModuli;
    int n_ = 0;
    std::vector<SquaredTerm> terms_;
    ComplexDenseTensor trace_tensor_;
    int trace_half_order_ = 0;
};

// U together with the tensors contracted by U^H / U^T on every mode, the
// current gradient matrix and cost value. rotated[] holds one tensor per
// squared term, or the single rotated trace tensor.
struct RotatedState {
    Eigen::MatrixXcd U;
    std::vector<ComplexDenseTensor> rotated;
    Eigen::MatrixXcd lambda;
    double f_value = 0.0;
    long rotations_since_refresh = 0;
};

struct DiagonalPhase {
    Eigen::VectorXcd z;  // unit-modulus entries
};

struct RefreshPolicy {
    long interval = 1000;
    double drift_tol = 1e-9;
};

// || U^H U - I ||_F
double unitarity_drift(const Eigen::MatrixXcd& U);

// Cost value straight from U, without building rotated tensors. Rejects U
// with unitarity drift above 1e-8.
double evaluate(const CostFunction& cost, const Eigen::MatrixXcd& U);

// Full contraction of every cost tensor by U, with gradient and value.
RotatedState rotate_full(const CostFunction& cost, const Eigen::MatrixXcd& U);

// Skew-Hermitian gradient coefficient matrix: the Riemannian gradient of the
// cost at state.U is U * lambda. Entries come from rotated-tensor entries
// with at most one index off the diagonal.
Eigen::MatrixXcd lambda_matrix(const CostFunction& cost, const RotatedState& state);

// In-place plane rotation: U <- U G(pair, rot) and the matching two-slice
// update of every rotated tensor; f is refreshed from the new diagonals.
// state.lambda is left stale, call lambda_incremental_update next.
void apply_givens_update(const CostFunction& cost, RotatedState& state,
                         IndexPair pair, const GivensRotation& rot);

// Recompute only the gradient rows/columns touched by a rotation at `pair`;
// all other entries are unchanged by construction.
void lambda_incremental_update(const CostFunction& cost, RotatedState& state,
                               IndexPair pair);

// U <- U diag(z) for unit-modulus z. Cost value is invariant; the gradient
// transforms as lambda <- diag(z)^H lambda diag(z).
void scale_columns(const CostFunction& cost, RotatedState& state,
                   const DiagonalPhase& phase);

// Re-orthonormalize U (polar projection) and rebuild the state from scratch
// when the rotation counter or drift threshold says so. Returns true when a
// refresh happened.
bool maybe_refresh(const CostFunction& cost, RotatedState& state,
                   const RefreshPolicy& policy = {});

// Off-diagonal energy of the rotated tensors (for squared kinds the sum of
// |W|^2 off the main diagonal, weighted by alpha).
double off_diagonal_energy(const CostFunction& cost, const RotatedState& state);

}  // namespace unijadi
