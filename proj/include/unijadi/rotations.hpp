#pragma once

#include <Eigen/Dense>

#include "unijadi/cost.hpp"
#include "unijadi/tensor.hpp"

namespace unijadi {

// Plane rotation [[c, -s], [s*, c]] with s = s1 + i s2 and c real,
// c^2 + |s|^2 = 1. Rotations produced by the optimizer keep c >= sqrt(2)/2.
struct GivensRotation {
    double c = 1.0;
    double s1 = 0.0;
    double s2 = 0.0;

    cplx s() const { return {s1, s2}; }
    // || Psi - I ||_F = 2 sqrt(1 - c) for a unit-determinant-normalized pair.
    double distance_to_identity() const;
};

// r = (2c^2 - 1, -2 c s1, -2 c s2); unit vector exactly when the rotation
// parameters satisfy c^2 + s1^2 + s2^2 = 1.
Eigen::Vector3d r_vector(const GivensRotation& rot);

// Restriction of the cost to one plane rotation: value = r^T gamma r +
// constant. The identity-pair mass sits inside gamma (as a multiple of I3),
// so `constant` carries only the diagonal entries outside the pair.
struct GammaMatrix {
    Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();
    double constant = 0.0;
};

// Assemble the quadratic form of the pair restriction from the rotated
// tensors. Matrix-only costs take a short closed-form path; everything else
// goes through restriction, tensor squaring and the three 2x2 basis
// contractions. Both paths agree entrywise.
GammaMatrix build_gamma(const CostFunction& cost, const RotatedState& state,
                        IndexPair pair);

namespace detail {
// The two assembly routes behind build_gamma, callable separately so tests
// can pin their agreement. The fast route requires every term to be an
// order-2 tensor conjugated on the left slot.
GammaMatrix build_gamma_generic(const CostFunction& cost, const RotatedState& state,
                                IndexPair pair);
GammaMatrix build_gamma_fast_matrix(const CostFunction& cost, const RotatedState& state,
                                    IndexPair pair);
}  // namespace detail

struct Eig3 {
    double lambda1 = 0.0;     // largest eigenvalue
    Eigen::Vector3d w;        // unit eigenvector, w(0) >= 0
    double gap = 0.0;         // lambda1 - lambda2 >= 0
};

// Largest eigenpair of a symmetric 3x3 matrix: analytic characteristic-cubic
// roots plus one refinement solve. Sign rule: w(0) >= 0, and if w(0) is zero
// the largest-magnitude component is made positive. Degenerate leading
// eigenvalues pick the eigenspace vector closest to e1.
Eig3 leading_eigvec3(const Eigen::Matrix3d& G);

// c = sqrt((w1+1)/2), s1 = -w2/(2c), s2 = -w3/(2c); requires w unit with
// w1 >= 0, which pins c in [sqrt(2)/2, 1] and makes r_vector(result) == w.
GivensRotation rotation_from_w(const Eigen::Vector3d& w);

// n x n unitary equal to the identity except rows/columns {pair.i, pair.j},
// which hold [[c, -s], [s*, c]].
Eigen::MatrixXcd givens_matrix(int n, IndexPair pair, const GivensRotation& rot);

double restriction_value(const GammaMatrix& G, const GivensRotation& rot);

// Gradient of the pair restriction at the identity rotation, equal to the
// corresponding gradient-matrix entry: 2 (gamma12 + i gamma13).
cplx restriction_gradient(const GammaMatrix& G);

// Hessian of the restriction at the identity in the two rotation directions:
// 2 * ([[g22, g23], [g32, g33]] - g11 I2). Negative definite exactly when
// g11 strictly dominates the lower 2x2 block.
Eigen::Matrix2d hessian_block(const GammaMatrix& G);

}  // namespace unijadi
