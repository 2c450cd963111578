#include "unijadi/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace unijadi {

namespace {

constexpr int kMaxOrder = 6;

void check_mode(const ComplexDenseTensor& T, int mode, const char* who) {
    if (mode < 0 || mode >= T.order())
        throw std::invalid_argument(std::string(who) + ": mode " + std::to_string(mode) +
                                    " out of range for order " + std::to_string(T.order()));
}

std::size_t product(const std::vector<int>& dims, int from, int to) {
    std::size_t p = 1;
    for (int k = from; k < to; ++k) p *= static_cast<std::size_t>(dims[k]);
    return p;
}

// All permutations of positions [lo, hi) extended to identity elsewhere.
std::vector<std::vector<int>> group_permutations(int order, int lo, int hi) {
    std::vector<int> window(hi - lo);
    std::iota(window.begin(), window.end(), lo);
    std::vector<std::vector<int>> perms;
    std::sort(window.begin(), window.end());
    do {
        std::vector<int> full(order);
        std::iota(full.begin(), full.end(), 0);
        for (int k = lo; k < hi; ++k) full[k] = window[k - lo];
        perms.push_back(std::move(full));
    } while (std::next_permutation(window.begin(), window.end()));
    return perms;
}

}  // namespace

IndexPair::IndexPair(int i_, int j_) : i(i_), j(j_) {
    if (i >= j || i < 0)
        throw std::invalid_argument("IndexPair: need 0 <= i < j, got (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
}

ComplexDenseTensor::ComplexDenseTensor() : data_(1, cplx(0.0)) { init_strides(); }

ComplexDenseTensor::ComplexDenseTensor(std::vector<int> dims) : dims_(std::move(dims)) {
    init_strides();
    data_.assign(product(dims_, 0, order()), cplx(0.0));
}

ComplexDenseTensor::ComplexDenseTensor(std::vector<int> dims, std::vector<cplx> values)
    : dims_(std::move(dims)), data_(std::move(values)) {
    init_strides();
    if (data_.size() != product(dims_, 0, order()))
        throw std::invalid_argument("ComplexDenseTensor: value count " +
                                    std::to_string(data_.size()) +
                                    " does not match dims product " +
                                    std::to_string(product(dims_, 0, order())));
}

void ComplexDenseTensor::init_strides() {
    if (order() > kMaxOrder)
        throw std::invalid_argument("ComplexDenseTensor: order " + std::to_string(order()) +
                                    " exceeds supported maximum " + std::to_string(kMaxOrder));
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("ComplexDenseTensor: nonpositive dimension");
    strides_.assign(dims_.size(), 1);
    for (int k = order() - 2; k >= 0; --k)
        strides_[k] = strides_[k + 1] * static_cast<std::size_t>(dims_[k + 1]);
}

int ComplexDenseTensor::dim(int mode) const {
    check_mode(*this, mode, "dim");
    return dims_[mode];
}

std::size_t ComplexDenseTensor::flat_index(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != order())
        throw std::invalid_argument("flat_index: index length " + std::to_string(idx.size()) +
                                    " for order " + std::to_string(order()));
    std::size_t flat = 0;
    for (int k = 0; k < order(); ++k) {
        if (idx[k] < 0 || idx[k] >= dims_[k])
            throw std::out_of_range("flat_index: index " + std::to_string(idx[k]) +
                                    " out of range in mode " + std::to_string(k));
        flat += static_cast<std::size_t>(idx[k]) * strides_[k];
    }
    return flat;
}

cplx ComplexDenseTensor::entry_one_off(int common, int mode, int value) const {
    std::size_t flat = 0;
    for (int k = 0; k < order(); ++k)
        flat += static_cast<std::size_t>(k == mode ? value : common) * strides_[k];
    return data_[flat];
}

cplx ComplexDenseTensor::diagonal_entry(int p) const {
    std::size_t flat = 0;
    for (int k = 0; k < order(); ++k) flat += static_cast<std::size_t>(p) * strides_[k];
    return data_[flat];
}

cplx ComplexDenseTensor::scalar() const {
    if (data_.size() != 1)
        throw std::logic_error("scalar: tensor has " + std::to_string(data_.size()) +
                               " entries");
    return data_[0];
}

double ComplexDenseTensor::frobenius_norm() const {
    double acc = 0.0;
    for (const cplx& z : data_) acc += std::norm(z);
    return std::sqrt(acc);
}

Eigen::MatrixXcd ComplexDenseTensor::as_matrix() const {
    if (order() != 2) throw std::logic_error("as_matrix: tensor order is not 2");
    Eigen::MatrixXcd M(dims_[0], dims_[1]);
    for (int r = 0; r < dims_[0]; ++r)
        for (int c = 0; c < dims_[1]; ++c) M(r, c) = data_[static_cast<std::size_t>(r) * dims_[1] + c];
    return M;
}

ComplexDenseTensor ComplexDenseTensor::from_matrix(const Eigen::MatrixXcd& M) {
    ComplexDenseTensor T({static_cast<int>(M.rows()), static_cast<int>(M.cols())});
    for (int r = 0; r < M.rows(); ++r)
        for (int c = 0; c < M.cols(); ++c) T.data_[static_cast<std::size_t>(r) * M.cols() + c] = M(r, c);
    return T;
}

ComplexDenseTensor contract_vector(const ComplexDenseTensor& T, int mode,
                                   const Eigen::VectorXcd& v, bool conjugate_vector) {
    check_mode(T, mode, "contract_vector");
    const int nj = T.dim(mode);
    if (v.size() != nj)
        throw std::invalid_argument("contract_vector: vector length " +
                                    std::to_string(v.size()) + " vs mode extent " +
                                    std::to_string(nj));
    std::vector<int> odims = T.dims();
    odims.erase(odims.begin() + mode);
    ComplexDenseTensor out(odims);

    const std::size_t suffix = product(T.dims(), mode + 1, T.order());
    const std::size_t prefix = T.size() / (suffix * static_cast<std::size_t>(nj));
    for (std::size_t p = 0; p < prefix; ++p) {
        const std::size_t obase = p * suffix;
        const std::size_t tbase = p * suffix * nj;
        for (int j = 0; j < nj; ++j) {
            const cplx vj = conjugate_vector ? std::conj(v(j)) : v(j);
            const std::size_t jbase = tbase + static_cast<std::size_t>(j) * suffix;
            for (std::size_t q = 0; q < suffix; ++q) out[obase + q] += T[jbase + q] * vj;
        }
    }
    return out;
}

ComplexDenseTensor contract_matrix(const ComplexDenseTensor& T, int mode,
                                   const Eigen::MatrixXcd& M, bool conjugate_matrix) {
    check_mode(T, mode, "contract_matrix");
    const int nj = T.dim(mode);
    if (M.cols() != nj)
        throw std::invalid_argument("contract_matrix: matrix has " +
                                    std::to_string(M.cols()) + " columns vs mode extent " +
                                    std::to_string(nj));
    const int nr = static_cast<int>(M.rows());
    std::vector<int> odims = T.dims();
    odims[mode] = nr;
    ComplexDenseTensor out(odims);

    const std::size_t suffix = product(T.dims(), mode + 1, T.order());
    const std::size_t prefix = T.size() / (suffix * static_cast<std::size_t>(nj));
    for (std::size_t p = 0; p < prefix; ++p) {
        const std::size_t tbase = p * suffix * nj;
        const std::size_t obase = p * suffix * nr;
        for (int r = 0; r < nr; ++r) {
            const std::size_t orow = obase + static_cast<std::size_t>(r) * suffix;
            for (int j = 0; j < nj; ++j) {
                cplx m = M(r, j);
                if (conjugate_matrix) m = std::conj(m);
                if (m == cplx(0.0)) continue;
                const std::size_t jbase = tbase + static_cast<std::size_t>(j) * suffix;
                for (std::size_t q = 0; q < suffix; ++q) out[orow + q] += T[jbase + q] * m;
            }
        }
    }
    return out;
}

ComplexDenseTensor subtensor_restrict(const ComplexDenseTensor& T, IndexPair pair) {
    const int d = T.order();
    for (int k = 0; k < d; ++k)
        if (pair.j >= T.dim(k))
            throw std::invalid_argument("subtensor_restrict: pair (" + std::to_string(pair.i) +
                                        ", " + std::to_string(pair.j) +
                                        ") exceeds extent of mode " + std::to_string(k));
    ComplexDenseTensor out(std::vector<int>(d, 2));
    const unsigned cells = 1u << d;
    for (unsigned b = 0; b < cells; ++b) {
        std::size_t tflat = 0;
        std::size_t oflat = 0;
        for (int k = 0; k < d; ++k) {
            const int bit = (b >> (d - 1 - k)) & 1u;
            tflat += static_cast<std::size_t>(bit ? pair.j : pair.i) * T.stride(k);
            oflat += static_cast<std::size_t>(bit) * out.stride(k);
        }
        out[oflat] = T[tflat];
    }
    return out;
}

ComplexDenseTensor semi_symmetrize(const ComplexDenseTensor& T, int t) {
    const int d = T.order();
    if (t < 0 || t > d)
        throw std::invalid_argument("semi_symmetrize: split " + std::to_string(t) +
                                    " outside [0, " + std::to_string(d) + "]");
    for (int k = 1; k < t; ++k)
        if (T.dim(k) != T.dim(0))
            throw std::invalid_argument("semi_symmetrize: unequal extents in first group");
    for (int k = t + 1; k < d; ++k)
        if (T.dim(k) != T.dim(t))
            throw std::invalid_argument("semi_symmetrize: unequal extents in second group");

    auto first = group_permutations(d, 0, t);
    auto second = group_permutations(d, t, d);
    ComplexDenseTensor out(T.dims());
    const double inv = 1.0 / (static_cast<double>(first.size()) * second.size());

    // Accumulate each orbit from its lexicographically smallest member so all
    // members receive the identical double, and skip orbits that are already
    // constant. Together these make the map exactly idempotent, which keeps
    // serialize/load/serialize cycles byte-stable.
    std::vector<int> idx(d, 0), pidx(d, 0), rep(d, 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        bool constant = true;
        bool have_rep = false;
        const cplx base = T[flat];
        for (const auto& p1 : first) {
            for (const auto& p2 : second) {
                for (int k = 0; k < t; ++k) pidx[k] = idx[p1[k]];
                for (int k = t; k < d; ++k) pidx[k] = idx[p2[k]];
                std::size_t pf = 0;
                for (int k = 0; k < d; ++k) pf += static_cast<std::size_t>(pidx[k]) * T.stride(k);
                if (T[pf] != base) constant = false;
                if (!have_rep || pidx < rep) {
                    rep = pidx;
                    have_rep = true;
                }
            }
        }
        if (constant) {
            out[flat] = base;
        } else {
            cplx acc = 0.0;
            for (const auto& p1 : first) {
                for (const auto& p2 : second) {
                    for (int k = 0; k < t; ++k) pidx[k] = rep[p1[k]];
                    for (int k = t; k < d; ++k) pidx[k] = rep[p2[k]];
                    std::size_t pf = 0;
                    for (int k = 0; k < d; ++k)
                        pf += static_cast<std::size_t>(pidx[k]) * T.stride(k);
                    acc += T[pf];
                }
            }
            out[flat] = acc * inv;
        }

        // row-major walk keeps flat in step with idx
        int k = d - 1;
        while (k >= 0 && ++idx[k] == T.dim(k)) idx[k--] = 0;
    }
    return out;
}

bool hermitian_check(const ComplexDenseTensor& B, int half_order, double tol,
                     double* max_dev) {
    const int d = half_order;
    if (B.order() != 2 * d)
        throw std::invalid_argument("hermitian_check: order " + std::to_string(B.order()) +
                                    " is not twice " + std::to_string(d));
    for (int k = 0; k < d; ++k)
        if (B.dim(k) != B.dim(k + d))
            throw std::invalid_argument("hermitian_check: extent mismatch between modes " +
                                        std::to_string(k) + " and " + std::to_string(k + d));

    double worst = 0.0;
    std::vector<int> idx(2 * d, 0), swapped(2 * d, 0);
    while (true) {
        for (int k = 0; k < d; ++k) {
            swapped[k] = idx[k + d];
            swapped[k + d] = idx[k];
        }
        worst = std::max(worst, std::abs(B.at(idx) - std::conj(B.at(swapped))));

        int k = 2 * d - 1;
        while (k >= 0 && ++idx[k] == B.dim(k)) idx[k--] = 0;
        if (k < 0) break;
    }
    if (max_dev) *max_dev = worst;
    return worst <= tol;
}

ComplexDenseTensor tensor_square_to_hermitian(const ComplexDenseTensor& A, int t) {
    const int d = A.order();
    if (d < 1) throw std::invalid_argument("tensor_square_to_hermitian: order-0 input");
    if (t < 0 || t > d)
        throw std::invalid_argument("tensor_square_to_hermitian: split " + std::to_string(t) +
                                    " outside [0, " + std::to_string(d) + "]");
    if (2 * d > kMaxOrder)
        throw std::invalid_argument("tensor_square_to_hermitian: squared order " +
                                    std::to_string(2 * d) + " exceeds supported maximum");

    std::vector<int> odims(2 * d);
    for (int k = 0; k < d; ++k) odims[k] = odims[k + d] = A.dim(k);
    ComplexDenseTensor out(odims);

    std::vector<int> idx(2 * d, 0), a1(d, 0), a2(d, 0);
    while (true) {
        // First factor takes i_1..i_t and j_{t+1}..j_d, second (conjugated)
        // takes j_1..j_t and i_{t+1}..i_d.
        for (int k = 0; k < t; ++k) {
            a1[k] = idx[k];
            a2[k] = idx[k + d];
        }
        for (int k = t; k < d; ++k) {
            a1[k] = idx[k + d];
            a2[k] = idx[k];
        }
        out.at(idx) = A.at(a1) * std::conj(A.at(a2));

        int k = 2 * d - 1;
        while (k >= 0 && ++idx[k] == out.dim(k)) idx[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

}  // namespace unijadi
