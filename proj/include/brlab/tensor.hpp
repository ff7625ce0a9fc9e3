#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "brlab/errors.hpp"

namespace brlab {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Dense complex tensor in row-major order. Site indices are 1-based in all
/// public interfaces (mirroring vertex labels); physical values are 0-based.
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(std::vector<std::int64_t> shape);
    DenseTensor(std::vector<std::int64_t> shape, std::vector<Cplx> entries);

    static DenseTensor zeros(std::vector<std::int64_t> shape) { return DenseTensor(std::move(shape)); }

    std::int64_t order() const { return static_cast<std::int64_t>(shape_.size()); }
    std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
    const std::vector<std::int64_t>& shape() const { return shape_; }
    std::int64_t dim(std::int64_t site) const { return shape_.at(static_cast<std::size_t>(site - 1)); }

    const std::vector<Cplx>& data() const { return data_; }
    std::vector<Cplx>& data() { return data_; }
    Cplx& operator[](std::int64_t linear) { return data_[static_cast<std::size_t>(linear)]; }
    const Cplx& operator[](std::int64_t linear) const { return data_[static_cast<std::size_t>(linear)]; }

    /// Row-major linear offset of a multi-index (0-based values).
    std::int64_t offset(const std::vector<std::int64_t>& idx) const;
    Cplx at(const std::vector<std::int64_t>& idx) const { return data_[static_cast<std::size_t>(offset(idx))]; }
    void set(const std::vector<std::int64_t>& idx, Cplx v) { data_[static_cast<std::size_t>(offset(idx))] = v; }

    /// Decode a linear offset back into a multi-index.
    std::vector<std::int64_t> unravel(std::int64_t linear) const;

    /// Same data, new shape (sizes must agree).
    DenseTensor reshaped(std::vector<std::int64_t> shape) const;

    bool all_finite() const;

    DenseTensor& operator+=(const DenseTensor& rhs);
    DenseTensor& operator-=(const DenseTensor& rhs);
    DenseTensor& operator*=(Cplx c);

    friend DenseTensor operator+(DenseTensor lhs, const DenseTensor& rhs) { return lhs += rhs; }
    friend DenseTensor operator-(DenseTensor lhs, const DenseTensor& rhs) { return lhs -= rhs; }
    friend DenseTensor operator*(Cplx c, DenseTensor t) { return t *= c; }

private:
    std::vector<std::int64_t> shape_;
    std::vector<Cplx> data_;
};

/// sqrt(sum |T_i|^2); rejects NaN/Inf entries.
double frobenius_norm(const DenseTensor& t);

/// Frobenius distance ||a - b||.
double distance(const DenseTensor& a, const DenseTensor& b);

/// Matricization: rows run over `left_sites` (1-based, ascending order of the
/// site labels), columns over the remaining sites. Pure index rearrangement.
Matrix unfold(const DenseTensor& t, const std::vector<std::int64_t>& left_sites);

/// Number of singular values above tol * sigma_max (tol must be positive).
std::int64_t matrix_rank(const Matrix& m, double tol = 1e-9);

bool is_hermitian(const Matrix& m, double tol = 1e-12);

/// lambda_min(M) >= -tol * max(1, ||M||_F); M must be Hermitian.
bool is_psd(const Matrix& m, double tol = 1e-10);

/// Largest eigenvalue of a Hermitian matrix.
double lambda_max(const Matrix& m);

/// All eigenvalues, ascending (Hermitian input).
RealVector hermitian_eigenvalues(const Matrix& m);

/// Diagonal embedding rho_T: an order-2n tensor with interleaved (row, col)
/// indices per site, nonzero only on the joint diagonal where it carries T.
DenseTensor diag_embed(const DenseTensor& t);

/// Read the joint diagonal of an interleaved multipartite matrix back as a
/// tensor; exact inverse of diag_embed on its image.
DenseTensor diagonal_part(const DenseTensor& op);

/// Apply a matrix (rows x dim(site)) to one site of a tensor.
DenseTensor mode_apply(const Matrix& m, const DenseTensor& t, std::int64_t site);

/// Axis permutation: new axis k is old axis perm[k] (0-based axes).
DenseTensor transpose(const DenseTensor& t, const std::vector<std::int64_t>& perm);

/// Multipartite matrices are order-2n tensors with interleaved (row, col)
/// site indices: shape (r1, c1, r2, c2, ...). These convert to and from the
/// flat (prod r_i) x (prod c_i) matrix.
Matrix operator_to_matrix(const DenseTensor& op);
DenseTensor matrix_to_operator(const Matrix& m, const std::vector<std::int64_t>& row_dims,
                               const std::vector<std::int64_t>& col_dims);

Cplx operator_trace(const DenseTensor& op);

}  // namespace brlab
