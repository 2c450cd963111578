#include "unijadi/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "unijadi/rotations.hpp"

namespace unijadi {

namespace {

constexpr double kUnitarityTol = 1e-8;
constexpr double kImagResidueTol = 1e-10;

void check_square_unitary(const Eigen::MatrixXcd& U, int n, const char* who) {
    if (U.rows() != n || U.cols() != n)
        throw std::invalid_argument(std::string(who) + ": U is " + std::to_string(U.rows()) +
                                    "x" + std::to_string(U.cols()) + ", cost has n = " +
                                    std::to_string(n));
    double drift = unitarity_drift(U);
    if (!(drift <= kUnitarityTol))
        throw std::invalid_argument(std::string(who) + ": U is not unitary, ||U^H U - I|| = " +
                                    std::to_string(drift));
}

// Multilinear form of T at a single column, first t slots conjugated.
cplx column_form(const ComplexDenseTensor& T, int t, const Eigen::VectorXcd& u) {
    ComplexDenseTensor r = contract_vector(T, 0, u, t > 0);
    for (int k = 1; k < T.order(); ++k) r = contract_vector(r, 0, u, k < t);
    return r.scalar();
}

// Sum |diagonal|^2 resp. Re(diagonal) over the rotated tensors; extended
// precision keeps the ascent audit clean near convergence.
double value_from_diagonals(const CostFunction& cost,
                            const std::vector<ComplexDenseTensor>& rotated) {
    long double acc = 0.0L;
    if (cost.kind() == CostKind::SquaredModuli) {
        for (std::size_t l = 0; l < rotated.size(); ++l) {
            const double alpha = cost.terms()[l].alpha;
            for (int p = 0; p < cost.n(); ++p) {
                cplx w = rotated[l].diagonal_entry(p);
                acc += static_cast<long double>(alpha) *
                       (static_cast<long double>(w.real()) * w.real() +
                        static_cast<long double>(w.imag()) * w.imag());
            }
        }
        return static_cast<double>(acc);
    }
    long double imag = 0.0L;
    for (int p = 0; p < cost.n(); ++p) {
        cplx v = rotated[0].diagonal_entry(p);
        acc += v.real();
        imag += v.imag();
    }
    double f = static_cast<double>(acc);
    if (std::abs(static_cast<double>(imag)) > kImagResidueTol * (1.0 + std::abs(f)))
        throw std::runtime_error("trace-form value has imaginary residue " +
                                 std::to_string(static_cast<double>(imag)));
    return f;
}

// Gradient entry for i < j from rotated-tensor entries with one index off
// the diagonal. Shared by the full and the incremental recomputation so the
// two agree bit for bit.
cplx lambda_entry(const CostFunction& cost, const std::vector<ComplexDenseTensor>& rotated,
                  int i, int j) {
    if (cost.kind() == CostKind::TraceForm) {
        const ComplexDenseTensor& V = rotated[0];
        const int d = cost.trace_half_order();
        cplx v_ij = V.entry_one_off(j, 0, i);            // V[i, j, ..., j]
        cplx v_ji = V.entry_one_off(i, 2 * d - 1, j);    // V[i, ..., i, j]
        return static_cast<double>(d) * (v_ij - v_ji);
    }
    cplx acc = 0.0;
    for (std::size_t l = 0; l < rotated.size(); ++l) {
        const SquaredTerm& term = cost.terms()[l];
        const ComplexDenseTensor& W = rotated[l];
        const int d = W.order();
        const int t = term.t;
        const cplx wii = W.diagonal_entry(i);
        const cplx wjj = W.diagonal_entry(j);
        cplx part = 0.0;
        if (t > 0) {
            cplx w_ijj = W.entry_one_off(j, 0, i);       // i in a conjugated slot
            cplx w_jii = W.entry_one_off(i, 0, j);
            part += static_cast<double>(t) * (std::conj(wjj) * w_ijj - wii * std::conj(w_jii));
        }
        if (d - t > 0) {
            cplx w_jji = W.entry_one_off(j, d - 1, i);   // i in a plain slot
            cplx w_iij = W.entry_one_off(i, d - 1, j);
            part += static_cast<double>(d - t) *
                    (wjj * std::conj(w_jji) - std::conj(wii) * w_iij);
        }
        acc += term.alpha * part;
    }
    return acc;
}

// Two-slice plane-rotation update along one mode. Conjugated modes take
// G^H, plain modes G^T; both leave every slice outside {i, j} untouched.
void rotate_mode(ComplexDenseTensor& W, int mode, IndexPair pair, const GivensRotation& rot,
                 bool conjugated) {
    const cplx s = rot.s();
    const double c = rot.c;
    // G^H mixes (slice_i, slice_j) -> (c a + s b, -conj(s) a + c b);
    // G^T uses conj(s) in place of s.
    const cplx mix = conjugated ? s : std::conj(s);

    std::size_t suffix = 1;
    for (int k = mode + 1; k < W.order(); ++k) suffix *= static_cast<std::size_t>(W.dim(k));
    const std::size_t nj = static_cast<std::size_t>(W.dim(mode));
    const std::size_t prefix = W.size() / (suffix * nj);
    for (std::size_t p = 0; p < prefix; ++p) {
        const std::size_t base = p * suffix * nj;
        const std::size_t row_i = base + static_cast<std::size_t>(pair.i) * suffix;
        const std::size_t row_j = base + static_cast<std::size_t>(pair.j) * suffix;
        for (std::size_t q = 0; q < suffix; ++q) {
            const cplx a = W[row_i + q];
            const cplx b = W[row_j + q];
            W[row_i + q] = c * a + mix * b;
            W[row_j + q] = -std::conj(mix) * a + c * b;
        }
    }
}

int conjugated_modes(const CostFunction& cost, std::size_t term_index) {
    return cost.kind() == CostKind::TraceForm ? cost.trace_half_order()
                                              : cost.terms()[term_index].t;
}

}  // namespace

CostFunction CostFunction::squared_moduli(int n, std::vector<SquaredTerm> terms) {
    if (n < 2) throw std::invalid_argument("CostFunction: need n >= 2");
    if (terms.empty()) throw std::invalid_argument("CostFunction: no terms");
    CostFunction cost;
    cost.kind_ = CostKind::SquaredModuli;
    cost.n_ = n;
    for (std::size_t l = 0; l < terms.size(); ++l) {
        SquaredTerm& term = terms[l];
        const int d = term.tensor.order();
        if (d < 1 || d > 3)
            throw std::invalid_argument("CostFunction: term " + std::to_string(l) +
                                        " has order " + std::to_string(d) +
                                        ", supported orders are 1..3");
        for (int k = 0; k < d; ++k)
            if (term.tensor.dim(k) != n)
                throw std::invalid_argument("CostFunction: term " + std::to_string(l) +
                                            " extent " + std::to_string(term.tensor.dim(k)) +
                                            " in mode " + std::to_string(k) + " vs n = " +
                                            std::to_string(n));
        if (term.t < 0 || term.t > d)
            throw std::invalid_argument("CostFunction: term " + std::to_string(l) +
                                        " conjugation count " + std::to_string(term.t) +
                                        " outside [0, " + std::to_string(d) + "]");
        if (!std::isfinite(term.alpha))
            throw std::invalid_argument("CostFunction: non-finite weight");
        term.tensor = semi_symmetrize(term.tensor, term.t);
    }
    cost.terms_ = std::move(terms);
    return cost;
}

CostFunction CostFunction::trace_form(int n, ComplexDenseTensor B, int half_order,
                                      double hermitian_tol) {
    if (n < 2) throw std::invalid_argument("CostFunction: need n >= 2");
    if (half_order < 1 || half_order > 2)
        throw std::invalid_argument(
            "CostFunction: trace form supports half-order 1 or 2; rewrite higher orders "
            "as squared-moduli terms");
    if (B.order() != 2 * half_order)
        throw std::invalid_argument("CostFunction: tensor order " +
                                    std::to_string(B.order()) + " vs expected " +
                                    std::to_string(2 * half_order));
    for (int k = 0; k < B.order(); ++k)
        if (B.dim(k) != n)
            throw std::invalid_argument("CostFunction: trace tensor extent mismatch in mode " +
                                        std::to_string(k));
    B = semi_symmetrize(B, half_order);
    double dev = 0.0;
    if (!hermitian_check(B, half_order, hermitian_tol, &dev))
        throw std::invalid_argument("CostFunction: trace tensor is not Hermitian, deviation " +
                                    std::to_string(dev));
    CostFunction cost;
    cost.kind_ = CostKind::TraceForm;
    cost.n_ = n;
    cost.trace_tensor_ = std::move(B);
    cost.trace_half_order_ = half_order;
    return cost;
}

const std::vector<SquaredTerm>& CostFunction::terms() const {
    if (kind_ != CostKind::SquaredModuli)
        throw std::logic_error("terms: cost is a trace form");
    return terms_;
}

const ComplexDenseTensor& CostFunction::trace_tensor() const {
    if (kind_ != CostKind::TraceForm)
        throw std::logic_error("trace_tensor: cost is a squared-moduli sum");
    return trace_tensor_;
}

int CostFunction::trace_half_order() const {
    if (kind_ != CostKind::TraceForm)
        throw std::logic_error("trace_half_order: cost is a squared-moduli sum");
    return trace_half_order_;
}

int CostFunction::max_half_order() const {
    if (kind_ == CostKind::TraceForm) return trace_half_order_;
    int d = 0;
    for (const auto& term : terms_) d = std::max(d, term.tensor.order());
    return d;
}

double unitarity_drift(const Eigen::MatrixXcd& U) {
    return (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.cols(), U.cols())).norm();
}

double evaluate(const CostFunction& cost, const Eigen::MatrixXcd& U) {
    check_square_unitary(U, cost.n(), "evaluate");
    long double acc = 0.0L;
    long double imag = 0.0L;
    if (cost.kind() == CostKind::SquaredModuli) {
        for (const auto& term : cost.terms())
            for (int p = 0; p < cost.n(); ++p)
                acc += term.alpha * std::norm(column_form(term.tensor, term.t, U.col(p)));
        return static_cast<double>(acc);
    }
    for (int p = 0; p < cost.n(); ++p) {
        cplx v = column_form(cost.trace_tensor(), cost.trace_half_order(), U.col(p));
        acc += v.real();
        imag += v.imag();
    }
    double f = static_cast<double>(acc);
    if (std::abs(static_cast<double>(imag)) > kImagResidueTol * (1.0 + std::abs(f)))
        throw std::runtime_error("evaluate: trace form produced imaginary residue " +
                                 std::to_string(static_cast<double>(imag)));
    return f;
}

RotatedState rotate_full(const CostFunction& cost, const Eigen::MatrixXcd& U) {
    check_square_unitary(U, cost.n(), "rotate_full");
    RotatedState state;
    state.U = U;
    const Eigen::MatrixXcd Uh = U.adjoint();
    const Eigen::MatrixXcd Ut = U.transpose();
    auto rotate_tensor = [&](const ComplexDenseTensor& T, int t) {
        ComplexDenseTensor W = T;
        for (int k = 0; k < W.order(); ++k)
            W = contract_matrix(W, k, k < t ? Uh : Ut, false);
        return W;
    };
    if (cost.kind() == CostKind::SquaredModuli) {
        for (const auto& term : cost.terms())
            state.rotated.push_back(rotate_tensor(term.tensor, term.t));
    } else {
        state.rotated.push_back(rotate_tensor(cost.trace_tensor(), cost.trace_half_order()));
    }
    state.f_value = value_from_diagonals(cost, state.rotated);
    state.lambda = lambda_matrix(cost, state);
    return state;
}

Eigen::MatrixXcd lambda_matrix(const CostFunction& cost, const RotatedState& state) {
    const int n = cost.n();
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            cplx v = lambda_entry(cost, state.rotated, i, j);
            lam(i, j) = v;
            lam(j, i) = -std::conj(v);
        }
    }
    return lam;
}

void apply_givens_update(const CostFunction& cost, RotatedState& state, IndexPair pair,
                         const GivensRotation& rot) {
    const double unit = rot.c * rot.c + rot.s1 * rot.s1 + rot.s2 * rot.s2;
    if (std::abs(unit - 1.0) > 1e-12)
        throw std::invalid_argument("apply_givens_update: rotation parameters off the "
                                    "sphere by " + std::to_string(unit - 1.0));
    if (pair.j >= cost.n())
        throw std::invalid_argument("apply_givens_update: pair out of range");

    // U <- U G: only columns i and j move.
    const cplx s = rot.s();
    Eigen::VectorXcd ui = state.U.col(pair.i);
    Eigen::VectorXcd uj = state.U.col(pair.j);
    state.U.col(pair.i) = rot.c * ui + std::conj(s) * uj;
    state.U.col(pair.j) = -s * ui + rot.c * uj;

    for (std::size_t l = 0; l < state.rotated.size(); ++l) {
        const int t = conjugated_modes(cost, l);
        ComplexDenseTensor& W = state.rotated[l];
        for (int k = 0; k < W.order(); ++k) rotate_mode(W, k, pair, rot, k < t);
    }
    state.f_value = value_from_diagonals(cost, state.rotated);
    ++state.rotations_since_refresh;
}

void lambda_incremental_update(const CostFunction& cost, RotatedState& state,
                               IndexPair pair) {
    const int n = cost.n();
    auto refresh_cross = [&](int x) {
        for (int y = 0; y < n; ++y) {
            if (y == x) continue;
            const int a = std::min(x, y);
            const int b = std::max(x, y);
            cplx v = lambda_entry(cost, state.rotated, a, b);
            state.lambda(a, b) = v;
            state.lambda(b, a) = -std::conj(v);
        }
    };
    refresh_cross(pair.i);
    refresh_cross(pair.j);
}

void scale_columns(const CostFunction& cost, RotatedState& state, const DiagonalPhase& phase) {
    const int n = cost.n();
    if (phase.z.size() != n)
        throw std::invalid_argument("scale_columns: phase vector length mismatch");
    for (int p = 0; p < n; ++p)
        if (std::abs(std::abs(phase.z(p)) - 1.0) > 1e-12)
            throw std::invalid_argument("scale_columns: entry " + std::to_string(p) +
                                        " is not unit modulus");

    state.U = state.U * phase.z.asDiagonal();
    for (std::size_t l = 0; l < state.rotated.size(); ++l) {
        const int t = conjugated_modes(cost, l);
        ComplexDenseTensor& W = state.rotated[l];
        for (int k = 0; k < W.order(); ++k) {
            std::size_t suffix = 1;
            for (int m = k + 1; m < W.order(); ++m) suffix *= W.dim(m);
            const std::size_t nj = static_cast<std::size_t>(W.dim(k));
            const std::size_t prefix = W.size() / (suffix * nj);
            for (std::size_t p = 0; p < prefix; ++p)
                for (std::size_t j = 0; j < nj; ++j) {
                    const cplx z = k < t ? std::conj(phase.z(j)) : phase.z(j);
                    const std::size_t base = (p * nj + j) * suffix;
                    for (std::size_t q = 0; q < suffix; ++q) W[base + q] *= z;
                }
        }
    }
    state.f_value = value_from_diagonals(cost, state.rotated);
    // Gradient conjugation: lambda <- S^H lambda S.
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            state.lambda(i, j) *= std::conj(phase.z(i)) * phase.z(j);
}

bool maybe_refresh(const CostFunction& cost, RotatedState& state, const RefreshPolicy& policy) {
    const bool due = state.rotations_since_refresh >= policy.interval ||
                     unitarity_drift(state.U) > policy.drift_tol;
    if (!due) return false;
    // Polar projection onto the unitary group, then rebuild from scratch.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(state.U,
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXcd Upolar = svd.matrixU() * svd.matrixV().adjoint();
    state = rotate_full(cost, Upolar);
    return true;
}

double off_diagonal_energy(const CostFunction& cost, const RotatedState& state) {
    double acc = 0.0;
    for (std::size_t l = 0; l < state.rotated.size(); ++l) {
        const ComplexDenseTensor& W = state.rotated[l];
        double total = 0.0, diag = 0.0;
        for (std::size_t k = 0; k < W.size(); ++k) total += std::norm(W[k]);
        for (int p = 0; p < cost.n(); ++p) diag += std::norm(W.diagonal_entry(p));
        const double alpha =
            cost.kind() == CostKind::SquaredModuli ? cost.terms()[l].alpha : 1.0;
        acc += alpha * (total - diag);
    }
    return acc;
}

}  // namespace unijadi
