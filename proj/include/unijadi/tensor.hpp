#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace unijadi {

using cplx = std::complex<double>;

// Unordered pair of distinct indices, stored as i < j.
struct IndexPair {
    int i = 0;
    int j = 1;

    IndexPair() = default;
    IndexPair(int i_, int j_);

    bool operator==(const IndexPair& other) const { return i == other.i && j == other.j; }
};

// Dense complex tensor of small order (<= 6), row-major with the last index
// fastest. Order 0 is a single scalar cell.
class ComplexDenseTensor {
public:
    ComplexDenseTensor();
    explicit ComplexDenseTensor(std::vector<int> dims);
    ComplexDenseTensor(std::vector<int> dims, std::vector<cplx> values);

    int order() const { return static_cast<int>(dims_.size()); }
    const std::vector<int>& dims() const { return dims_; }
    int dim(int mode) const;
    std::size_t size() const { return data_.size(); }

    cplx& operator[](std::size_t flat) { return data_[flat]; }
    const cplx& operator[](std::size_t flat) const { return data_[flat]; }

    std::size_t flat_index(const std::vector<int>& idx) const;
    cplx& at(const std::vector<int>& idx) { return data_[flat_index(idx)]; }
    const cplx& at(const std::vector<int>& idx) const { return data_[flat_index(idx)]; }

    // Entry with one index at `mode` and a common value everywhere else,
    // e.g. entry_one_off(i, 0, j) is T[i, j, j, ..., j].
    cplx entry_one_off(int common, int mode, int value) const;
    cplx diagonal_entry(int p) const;

    cplx scalar() const;

    std::size_t stride(int mode) const { return strides_[mode]; }

    std::vector<cplx>& data() { return data_; }
    const std::vector<cplx>& data() const { return data_; }

    double frobenius_norm() const;

    // Order-2 bridge to Eigen.
    Eigen::MatrixXcd as_matrix() const;
    static ComplexDenseTensor from_matrix(const Eigen::MatrixXcd& M);

private:
    std::vector<int> dims_;
    std::vector<std::size_t> strides_;
    std::vector<cplx> data_;

    void init_strides();
};

// Sum over index j in one mode: out[...] = sum_j T[.., j, ..] * v[j].
// With conjugate_vector the conjugated entries conj(v[j]) are used instead.
ComplexDenseTensor contract_vector(const ComplexDenseTensor& T, int mode,
                                   const Eigen::VectorXcd& v, bool conjugate_vector);

// Mode-k product: out[.., r, ..] = sum_j T[.., j, ..] * M(r, j), so applying
// M on mode k of every slice. conjugate_matrix uses conj(M(r, j)).
ComplexDenseTensor contract_matrix(const ComplexDenseTensor& T, int mode,
                                   const Eigen::MatrixXcd& M, bool conjugate_matrix);

// 2 x ... x 2 restriction keeping only indices from {pair.i, pair.j} in every
// mode (local index 0 -> pair.i, 1 -> pair.j).
ComplexDenseTensor subtensor_restrict(const ComplexDenseTensor& T, IndexPair pair);

// Average over permutations within the first t modes and, independently,
// within the remaining modes. Idempotent; t must lie in [0, order].
ComplexDenseTensor semi_symmetrize(const ComplexDenseTensor& T, int t);

// For an order-2d tensor: is B[i1..id, j1..jd] == conj(B[j1..jd, i1..id])
// within tol? Reports the worst deviation through max_dev when given.
bool hermitian_check(const ComplexDenseTensor& B, int half_order, double tol,
                     double* max_dev = nullptr);

// Order-2d tensor B with B[i1..id, j1..jd] = A[i1..it, j_{t+1}..jd] *
// conj(A[j1..jt, i_{t+1}..id]). Its trace-form value at u equals the squared
// modulus of the form of A at u; the result is Hermitian by construction.
ComplexDenseTensor tensor_square_to_hermitian(const ComplexDenseTensor& A, int t);

}  // namespace unijadi
