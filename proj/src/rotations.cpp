#include "unijadi/rotations.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace unijadi {

namespace {

constexpr double kImagGuard = 1e-8;

// Hermitian basis behind the rotation parametrization: the rank-one update
// psi1 psi1^H - psi2 psi2^H of a plane rotation equals r1 E1 + r2 E2 + r3 E3
// with r = (2c^2 - 1, -2 c s1, -2 c s2).
const Eigen::Matrix2cd& basis_matrix(int a) {
    static const std::array<Eigen::Matrix2cd, 3> E = [] {
        std::array<Eigen::Matrix2cd, 3> e;
        e[0] << 1, 0, 0, -1;
        e[1] << 0, -1, -1, 0;
        e[2] << 0, cplx(0, -1), cplx(0, 1), 0;
        return e;
    }();
    return E[a];
}

// Full contraction of an order-2d tensor with extents all 2: sum over every
// multi-index x of T[x] * prod_k M_k(x_k, x_{d+k}). With dims all 2 the
// row-major flat index of x is the bit mask itself.
cplx pair_contract(const ComplexDenseTensor& T, const std::array<const Eigen::Matrix2cd*, 3>& slot,
                   int d) {
    const int total_bits = 2 * d;
    const unsigned cells = 1u << total_bits;
    cplx acc = 0.0;
    for (unsigned mask = 0; mask < cells; ++mask) {
        cplx prod = T[mask];
        if (prod == cplx(0.0)) continue;
        for (int k = 0; k < d; ++k) {
            const int xi = (mask >> (total_bits - 1 - k)) & 1u;
            const int xj = (mask >> (total_bits - 1 - (k + d))) & 1u;
            const Eigen::Matrix2cd* M = k < 3 ? slot[k] : nullptr;
            prod *= M ? (*M)(xj, xi) : (xi == xj ? cplx(1.0) : cplx(0.0));
            if (prod == cplx(0.0)) break;
        }
        acc += prod;
    }
    return acc;
}

double real_checked(cplx v, const char* what) {
    if (std::abs(v.imag()) > kImagGuard * (1.0 + std::abs(v.real())))
        throw std::runtime_error(std::string(what) + ": imaginary residue " +
                                 std::to_string(v.imag()));
    return v.real();
}

// Contribution of one Hermitian, half-symmetrized order-2d restriction to
// the rotation quadratic form. The identity-pair mass enters gamma as a
// multiple of I3 (the on-sphere normalization the matrix fast path uses),
// so the additive constant of this block is zero.
void accumulate_quadratic(const ComplexDenseTensor& Tq, int d, double weight,
                          Eigen::Matrix3d& gamma) {
    std::array<const Eigen::Matrix2cd*, 3> slot{nullptr, nullptr, nullptr};
    const double scale = std::ldexp(weight, 1 - d);  // weight * 2^(1-d)

    const double ident = real_checked(pair_contract(Tq, slot, d), "gamma identity term");
    gamma += scale * ident * Eigen::Matrix3d::Identity();

    const int pairs2 = d * (d - 1) / 2;  // binomial(d, 2)
    if (pairs2 == 0) return;
    for (int a = 0; a < 3; ++a) {
        for (int b = a; b < 3; ++b) {
            slot[0] = &basis_matrix(a);
            slot[1] = &basis_matrix(b);
            const cplx vab = pair_contract(Tq, slot, d);
            slot[0] = &basis_matrix(b);
            slot[1] = &basis_matrix(a);
            const cplx vba = pair_contract(Tq, slot, d);
            slot[0] = slot[1] = nullptr;
            const double v =
                0.5 * (real_checked(vab, "gamma basis term") + real_checked(vba, "gamma basis term"));
            gamma(a, b) += scale * pairs2 * v;
            if (b > a) gamma(b, a) += scale * pairs2 * v;
        }
    }
}

bool is_pure_matrix_cost(const CostFunction& cost) {
    if (cost.kind() != CostKind::SquaredModuli) return false;
    for (const auto& term : cost.terms())
        if (term.tensor.order() != 2 || term.t != 1) return false;
    return true;
}

double off_pair_diagonal(const CostFunction& cost, const RotatedState& state, IndexPair pair) {
    long double acc = 0.0L;
    long double imag = 0.0L;
    for (std::size_t l = 0; l < state.rotated.size(); ++l) {
        const ComplexDenseTensor& W = state.rotated[l];
        for (int k = 0; k < cost.n(); ++k) {
            if (k == pair.i || k == pair.j) continue;
            const cplx w = W.diagonal_entry(k);
            if (cost.kind() == CostKind::SquaredModuli)
                acc += cost.terms()[l].alpha * std::norm(w);
            else {
                acc += w.real();
                imag += w.imag();
            }
        }
    }
    const double c = static_cast<double>(acc);
    if (std::abs(static_cast<double>(imag)) > kImagGuard * (1.0 + std::abs(c)))
        throw std::runtime_error("gamma constant: imaginary residue on the diagonal");
    return c;
}

void check_pair(const CostFunction& cost, IndexPair pair) {
    if (pair.j >= cost.n())
        throw std::invalid_argument("build_gamma: pair (" + std::to_string(pair.i) + ", " +
                                    std::to_string(pair.j) + ") out of range for n = " +
                                    std::to_string(cost.n()));
}

}  // namespace

namespace detail {

GammaMatrix build_gamma_generic(const CostFunction& cost, const RotatedState& state,
                                IndexPair pair) {
    check_pair(cost, pair);
    GammaMatrix out;
    if (cost.kind() == CostKind::SquaredModuli) {
        for (std::size_t l = 0; l < cost.terms().size(); ++l) {
            const SquaredTerm& term = cost.terms()[l];
            const int d = term.tensor.order();
            if (d > 3)
                throw std::invalid_argument(
                    "build_gamma: no elementary rotation update beyond order 3");
            ComplexDenseTensor T2 = subtensor_restrict(state.rotated[l], pair);
            ComplexDenseTensor Tq =
                semi_symmetrize(tensor_square_to_hermitian(T2, term.t), d);
            accumulate_quadratic(Tq, d, term.alpha, out.gamma);
        }
    } else {
        const int d = cost.trace_half_order();
        if (d > 2)
            throw std::invalid_argument(
                "build_gamma: trace forms beyond half-order 2 are unsupported; use the "
                "squared-moduli representation");
        // Restriction of a Hermitian half-symmetrized tensor keeps both
        // properties, no re-normalization needed.
        ComplexDenseTensor Tq = subtensor_restrict(state.rotated[0], pair);
        accumulate_quadratic(Tq, d, 1.0, out.gamma);
    }
    out.constant = off_pair_diagonal(cost, state, pair);
    return out;
}

GammaMatrix build_gamma_fast_matrix(const CostFunction& cost, const RotatedState& state,
                                    IndexPair pair) {
    check_pair(cost, pair);
    if (!is_pure_matrix_cost(cost))
        throw std::logic_error("build_gamma_fast_matrix: cost has non-matrix terms");
    GammaMatrix out;
    for (std::size_t l = 0; l < cost.terms().size(); ++l) {
        const ComplexDenseTensor& W = state.rotated[l];
        const cplx wii = W.at({pair.i, pair.i});
        const cplx wij = W.at({pair.i, pair.j});
        const cplx wji = W.at({pair.j, pair.i});
        const cplx wjj = W.at({pair.j, pair.j});
        Eigen::Vector3cd z;
        z << wjj - wii, wij + wji, cplx(0, -1) * (wij - wji);
        const double tr2 = std::norm(wii + wjj);
        out.gamma += 0.5 * cost.terms()[l].alpha *
                     (tr2 * Eigen::Matrix3d::Identity() + (z * z.adjoint()).real().matrix());
    }
    out.constant = off_pair_diagonal(cost, state, pair);
    return out;
}

}  // namespace detail

double GivensRotation::distance_to_identity() const {
    // 1 - c == |s|^2 / (1 + c) under c^2 + |s|^2 = 1; the division form keeps
    // full precision for near-identity rotations where 1 - c underflows ulp.
    return 2.0 * std::sqrt((s1 * s1 + s2 * s2) / (1.0 + c));
}

Eigen::Vector3d r_vector(const GivensRotation& rot) {
    return {2.0 * rot.c * rot.c - 1.0, -2.0 * rot.c * rot.s1, -2.0 * rot.c * rot.s2};
}

GammaMatrix build_gamma(const CostFunction& cost, const RotatedState& state, IndexPair pair) {
    if (is_pure_matrix_cost(cost)) return detail::build_gamma_fast_matrix(cost, state, pair);
    return detail::build_gamma_generic(cost, state, pair);
}

Eig3 leading_eigvec3(const Eigen::Matrix3d& Gin) {
    const Eigen::Matrix3d G = 0.5 * (Gin + Gin.transpose());
    const double q = G.trace() / 3.0;
    const Eigen::Matrix3d Gq = G - q * Eigen::Matrix3d::Identity();
    const double p2 = Gq.squaredNorm();
    const double scale = std::max(1.0, G.cwiseAbs().maxCoeff());

    Eig3 out;
    if (p2 <= 1e-30 * scale * scale) {
        // Numerically a multiple of the identity: every direction is an
        // eigenvector, pick e1 so the rotation downstream is the identity.
        out.lambda1 = q;
        out.w = Eigen::Vector3d::UnitX();
        out.gap = 0.0;
        return out;
    }

    // Trigonometric roots of the characteristic cubic.
    const double p = std::sqrt(p2 / 6.0);
    const Eigen::Matrix3d B = Gq / p;
    const double r = std::clamp(B.determinant() / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double l1 = q + 2.0 * p * std::cos(phi);
    const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    const double l2 = 3.0 * q - l1 - l3;

    const double degenerate_tol = 1e-12 * scale;
    Eigen::Vector3d w;
    if (l1 - l2 <= degenerate_tol) {
        if (l1 - l3 <= degenerate_tol) {
            w = Eigen::Vector3d::UnitX();
        } else {
            // Double leading eigenvalue: (G - l3 I) maps onto its 2D
            // eigenspace; project a coordinate axis through it.
            const Eigen::Matrix3d M = G - l3 * Eigen::Matrix3d::Identity();
            w = M.col(0);
            if (w.norm() <= 1e-8 * scale) w = M.col(1);
            w.normalize();
        }
    } else {
        // Kernel direction of G - l1 I via its two most independent rows.
        const Eigen::Matrix3d A = G - l1 * Eigen::Matrix3d::Identity();
        Eigen::Vector3d best = Eigen::Vector3d::Zero();
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const Eigen::Vector3d cr = A.row(a).cross(A.row(b));
                if (cr.squaredNorm() > best.squaredNorm()) best = cr;
            }
        w = best.squaredNorm() > 0 ? best.normalized() : Eigen::Vector3d::UnitX();
        // One shifted inverse-iteration step sharpens the direction.
        const double shift = l1 + 1e-11 * scale;
        const Eigen::Matrix3d S = G - shift * Eigen::Matrix3d::Identity();
        const Eigen::Vector3d y = Eigen::FullPivLU<Eigen::Matrix3d>(S).solve(w);
        if (y.allFinite() && y.norm() > 0) w = y.normalized();
    }

    // Sign rule: first component nonnegative; if it vanishes, make the
    // largest-magnitude component positive.
    if (w(0) > 1e-12) {
        // keep
    } else if (w(0) < -1e-12) {
        w = -w;
    } else {
        int imax = 0;
        w.cwiseAbs().maxCoeff(&imax);
        if (w(imax) < 0) w = -w;
    }

    out.lambda1 = w.dot(G * w);
    out.w = w;
    out.gap = std::max(0.0, l1 - l2);
    return out;
}

GivensRotation rotation_from_w(const Eigen::Vector3d& w) {
    if (std::abs(w.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("rotation_from_w: |w| = " + std::to_string(w.norm()));
    if (w(0) < -1e-12)
        throw std::invalid_argument("rotation_from_w: negative leading component " +
                                    std::to_string(w(0)));
    const double w1 = std::max(0.0, w(0));
    GivensRotation rot;
    rot.c = std::sqrt((w1 + 1.0) / 2.0);
    rot.s1 = -w(1) / (2.0 * rot.c);
    rot.s2 = -w(2) / (2.0 * rot.c);
    // Defensive renormalization; exact algebra already lands on the sphere.
    const double norm = std::sqrt(rot.c * rot.c + rot.s1 * rot.s1 + rot.s2 * rot.s2);
    rot.c /= norm;
    rot.s1 /= norm;
    rot.s2 /= norm;
    return rot;
}

Eigen::MatrixXcd givens_matrix(int n, IndexPair pair, const GivensRotation& rot) {
    if (pair.j >= n) throw std::invalid_argument("givens_matrix: pair out of range");
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Identity(n, n);
    const cplx s = rot.s();
    G(pair.i, pair.i) = rot.c;
    G(pair.j, pair.j) = rot.c;
    G(pair.i, pair.j) = -s;
    G(pair.j, pair.i) = std::conj(s);
    return G;
}

double restriction_value(const GammaMatrix& G, const GivensRotation& rot) {
    const Eigen::Vector3d r = r_vector(rot);
    return r.dot(G.gamma * r) + G.constant;
}

cplx restriction_gradient(const GammaMatrix& G) {
    return 2.0 * cplx(G.gamma(0, 1), G.gamma(0, 2));
}

Eigen::Matrix2d hessian_block(const GammaMatrix& G) {
    return 2.0 * (G.gamma.block<2, 2>(1, 1) - G.gamma(0, 0) * Eigen::Matrix2d::Identity());
}

}  // namespace unijadi
