#include "brlab/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace brlab {

namespace {

std::int64_t checked_product(const std::vector<std::int64_t>& shape) {
    std::int64_t n = 1;
    for (auto d : shape) {
        if (d <= 0) throw ValidationError("tensor dimensions must be positive");
        if (n > (std::int64_t{1} << 40) / d) throw ResourceError("tensor too large");
        n *= d;
    }
    return n;
}

}  // namespace

DenseTensor::DenseTensor(std::vector<std::int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<std::size_t>(checked_product(shape_)), Cplx(0.0, 0.0));
}

DenseTensor::DenseTensor(std::vector<std::int64_t> shape, std::vector<Cplx> entries)
    : shape_(std::move(shape)), data_(std::move(entries)) {
    if (static_cast<std::int64_t>(data_.size()) != checked_product(shape_))
        throw ValidationError("entry count does not match shape");
}

std::int64_t DenseTensor::offset(const std::vector<std::int64_t>& idx) const {
    if (idx.size() != shape_.size()) throw ValidationError("index order mismatch");
    std::int64_t off = 0;
    for (std::size_t k = 0; k < shape_.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= shape_[k]) throw ValidationError("index out of range");
        off = off * shape_[k] + idx[k];
    }
    return off;
}

std::vector<std::int64_t> DenseTensor::unravel(std::int64_t linear) const {
    std::vector<std::int64_t> idx(shape_.size());
    for (std::size_t k = shape_.size(); k-- > 0;) {
        idx[k] = linear % shape_[k];
        linear /= shape_[k];
    }
    return idx;
}

DenseTensor DenseTensor::reshaped(std::vector<std::int64_t> shape) const {
    if (checked_product(shape) != size()) throw ValidationError("reshape changes size");
    return DenseTensor(std::move(shape), data_);
}

bool DenseTensor::all_finite() const {
    for (const auto& z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

DenseTensor& DenseTensor::operator+=(const DenseTensor& rhs) {
    if (shape_ != rhs.shape_) throw ValidationError("shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator-=(const DenseTensor& rhs) {
    if (shape_ != rhs.shape_) throw ValidationError("shape mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

DenseTensor& DenseTensor::operator*=(Cplx c) {
    for (auto& z : data_) z *= c;
    return *this;
}

double frobenius_norm(const DenseTensor& t) {
    if (!t.all_finite()) throw ValidationError("tensor has non-finite entries");
    double s = 0.0;
    for (const auto& z : t.data()) s += std::norm(z);
    return std::sqrt(s);
}

double distance(const DenseTensor& a, const DenseTensor& b) {
    if (a.shape() != b.shape()) throw ValidationError("shape mismatch");
    double s = 0.0;
    for (std::int64_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    if (!std::isfinite(s)) throw ValidationError("non-finite distance");
    return std::sqrt(s);
}

Matrix unfold(const DenseTensor& t, const std::vector<std::int64_t>& left_sites) {
    const auto n = t.order();
    std::vector<bool> on_left(static_cast<std::size_t>(n), false);
    for (auto s : left_sites) {
        if (s < 1 || s > n) throw ValidationError("unfold: site index out of range");
        if (on_left[static_cast<std::size_t>(s - 1)]) throw ValidationError("unfold: repeated site");
        on_left[static_cast<std::size_t>(s - 1)] = true;
    }
    std::int64_t rows = 1, cols = 1;
    for (std::int64_t k = 0; k < n; ++k)
        (on_left[static_cast<std::size_t>(k)] ? rows : cols) *= t.shape()[static_cast<std::size_t>(k)];
    if (rows == 1 || cols == 1) throw ValidationError("unfold: bipartition must be proper");

    Matrix m = Matrix::Zero(rows, cols);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(n), 0);
    for (std::int64_t lin = 0; lin < t.size(); ++lin) {
        std::int64_t r = 0, c = 0;
        std::int64_t rem = lin;
        for (std::int64_t k = n; k-- > 0;) {
            idx[static_cast<std::size_t>(k)] = rem % t.shape()[static_cast<std::size_t>(k)];
            rem /= t.shape()[static_cast<std::size_t>(k)];
        }
        for (std::int64_t k = 0; k < n; ++k) {
            if (on_left[static_cast<std::size_t>(k)])
                r = r * t.shape()[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(k)];
            else
                c = c * t.shape()[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(k)];
        }
        m(r, c) = t[lin];
    }
    return m;
}

std::int64_t matrix_rank(const Matrix& m, double tol) {
    if (tol <= 0.0) throw ValidationError("matrix_rank: tol must be positive");
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double smax = sv(0);
    if (smax <= 0.0) return 0;
    std::int64_t r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol * smax) ++r;
    return r;
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
    return dev <= tol * std::max(1.0, m.norm());
}

bool is_psd(const Matrix& m, double tol) {
    if (!is_hermitian(m, 1e-10)) throw ValidationError("is_psd: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, m.norm());
}

double lambda_max(const Matrix& m) {
    if (!is_hermitian(m, 1e-10)) throw ValidationError("lambda_max: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

RealVector hermitian_eigenvalues(const Matrix& m) {
    if (!is_hermitian(m, 1e-10)) throw ValidationError("eigenvalues: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

DenseTensor diag_embed(const DenseTensor& t) {
    std::vector<std::int64_t> shape;
    shape.reserve(static_cast<std::size_t>(2 * t.order()));
    for (auto d : t.shape()) {
        shape.push_back(d);
        shape.push_back(d);
    }
    DenseTensor op(shape);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(2 * t.order()), 0);
    for (std::int64_t lin = 0; lin < t.size(); ++lin) {
        auto j = t.unravel(lin);
        for (std::size_t k = 0; k < j.size(); ++k) {
            idx[2 * k] = j[k];
            idx[2 * k + 1] = j[k];
        }
        op.set(idx, t[lin]);
    }
    return op;
}

DenseTensor diagonal_part(const DenseTensor& op) {
    if (op.order() % 2 != 0) throw ValidationError("diagonal_part: order must be even");
    const std::int64_t n = op.order() / 2;
    std::vector<std::int64_t> shape(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k) {
        if (op.shape()[static_cast<std::size_t>(2 * k)] != op.shape()[static_cast<std::size_t>(2 * k + 1)])
            throw ValidationError("diagonal_part: row/col dims differ");
        shape[static_cast<std::size_t>(k)] = op.shape()[static_cast<std::size_t>(2 * k)];
    }
    DenseTensor t(shape);
    std::vector<std::int64_t> idx(static_cast<std::size_t>(2 * n), 0);
    for (std::int64_t lin = 0; lin < t.size(); ++lin) {
        auto j = t.unravel(lin);
        for (std::size_t k = 0; k < j.size(); ++k) {
            idx[2 * k] = j[k];
            idx[2 * k + 1] = j[k];
        }
        t[lin] = op.at(idx);
    }
    return t;
}

DenseTensor mode_apply(const Matrix& m, const DenseTensor& t, std::int64_t site) {
    if (site < 1 || site > t.order()) throw ValidationError("mode_apply: site out of range");
    const std::int64_t s = t.shape()[static_cast<std::size_t>(site - 1)];
    if (m.cols() != s) throw ValidationError("mode_apply: dimension mismatch");
    std::int64_t outer = 1, inner = 1;
    for (std::int64_t k = 0; k < site - 1; ++k) outer *= t.shape()[static_cast<std::size_t>(k)];
    for (std::int64_t k = site; k < t.order(); ++k) inner *= t.shape()[static_cast<std::size_t>(k)];

    auto shape = t.shape();
    shape[static_cast<std::size_t>(site - 1)] = m.rows();
    DenseTensor out(shape);
    for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t a = 0; a < m.rows(); ++a)
            for (std::int64_t b = 0; b < s; ++b) {
                const Cplx w = m(a, b);
                if (w == Cplx(0.0, 0.0)) continue;
                const std::int64_t src = (o * s + b) * inner;
                const std::int64_t dst = (o * m.rows() + a) * inner;
                for (std::int64_t i = 0; i < inner; ++i) out[dst + i] += w * t[src + i];
            }
    return out;
}

DenseTensor transpose(const DenseTensor& t, const std::vector<std::int64_t>& perm) {
    if (static_cast<std::int64_t>(perm.size()) != t.order()) throw ValidationError("transpose: bad permutation");
    std::vector<std::int64_t> shape(perm.size());
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t k = 0; k < perm.size(); ++k) {
        if (perm[k] < 0 || perm[k] >= t.order() || seen[static_cast<std::size_t>(perm[k])])
            throw ValidationError("transpose: bad permutation");
        seen[static_cast<std::size_t>(perm[k])] = true;
        shape[k] = t.shape()[static_cast<std::size_t>(perm[k])];
    }
    DenseTensor out(shape);
    std::vector<std::int64_t> old_idx(perm.size(), 0);
    for (std::int64_t lin = 0; lin < out.size(); ++lin) {
        auto new_idx = out.unravel(lin);
        for (std::size_t k = 0; k < perm.size(); ++k) old_idx[static_cast<std::size_t>(perm[k])] = new_idx[k];
        out[lin] = t.at(old_idx);
    }
    return out;
}

Matrix operator_to_matrix(const DenseTensor& op) {
    if (op.order() % 2 != 0) throw ValidationError("operator_to_matrix: order must be even");
    const std::int64_t n = op.order() / 2;
    std::int64_t rows = 1, cols = 1;
    for (std::int64_t k = 0; k < n; ++k) {
        rows *= op.shape()[static_cast<std::size_t>(2 * k)];
        cols *= op.shape()[static_cast<std::size_t>(2 * k + 1)];
    }
    Matrix m = Matrix::Zero(rows, cols);
    for (std::int64_t lin = 0; lin < op.size(); ++lin) {
        auto idx = op.unravel(lin);
        std::int64_t r = 0, c = 0;
        for (std::int64_t k = 0; k < n; ++k) {
            r = r * op.shape()[static_cast<std::size_t>(2 * k)] + idx[static_cast<std::size_t>(2 * k)];
            c = c * op.shape()[static_cast<std::size_t>(2 * k + 1)] + idx[static_cast<std::size_t>(2 * k + 1)];
        }
        m(r, c) = op[lin];
    }
    return m;
}

DenseTensor matrix_to_operator(const Matrix& m, const std::vector<std::int64_t>& row_dims,
                               const std::vector<std::int64_t>& col_dims) {
    if (row_dims.size() != col_dims.size()) throw ValidationError("matrix_to_operator: rank mismatch");
    const std::int64_t n = static_cast<std::int64_t>(row_dims.size());
    std::vector<std::int64_t> shape;
    for (std::int64_t k = 0; k < n; ++k) {
        shape.push_back(row_dims[static_cast<std::size_t>(k)]);
        shape.push_back(col_dims[static_cast<std::size_t>(k)]);
    }
    DenseTensor op(shape);
    for (std::int64_t lin = 0; lin < op.size(); ++lin) {
        auto idx = op.unravel(lin);
        std::int64_t r = 0, c = 0;
        for (std::int64_t k = 0; k < n; ++k) {
            r = r * row_dims[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(2 * k)];
            c = c * col_dims[static_cast<std::size_t>(k)] + idx[static_cast<std::size_t>(2 * k + 1)];
        }
        op[lin] = m(r, c);
    }
    return op;
}

Cplx operator_trace(const DenseTensor& op) {
    const DenseTensor diag = diagonal_part(op);
    return std::accumulate(diag.data().begin(), diag.data().end(), Cplx(0.0, 0.0));
}

}  // namespace brlab
