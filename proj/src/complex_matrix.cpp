#include "blockpythag/complex_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace blockpythag {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
    : rows_(rows), cols_(cols), a_(std::move(data)) {
    if (a_.size() != rows * cols)
        throw std::invalid_argument("ComplexMatrix: data size does not match shape");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    a_.reserve(rows_ * cols_);
    for (const auto& row : init) {
        if (row.size() != cols_)
            throw std::invalid_argument("ComplexMatrix: ragged initializer");
        for (const auto& v : row) a_.push_back(v);
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

ComplexMatrix ComplexMatrix::zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

ComplexMatrix ComplexMatrix::transpose() const {
    ComplexMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

ComplexMatrix ComplexMatrix::conj() const {
    ComplexMatrix m(rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = std::conj(a_[k]);
    return m;
}

ComplexMatrix ComplexMatrix::col(std::size_t j) const { return col_range(j, 1); }

ComplexMatrix ComplexMatrix::col_range(std::size_t begin, std::size_t count) const {
    if (begin + count > cols_) throw std::out_of_range("col_range");
    ComplexMatrix m(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, begin + j);
    return m;
}

void ComplexMatrix::set_col(std::size_t j, const ComplexMatrix& v) {
    if (v.rows() != rows_ || v.cols() != 1) throw std::invalid_argument("set_col shape");
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v(i, 0);
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
    if (!same_shape(o)) throw std::invalid_argument("matrix add: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
    if (!same_shape(o)) throw std::invalid_argument("matrix sub: shape mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

double ComplexMatrix::norm_fro() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double ComplexMatrix::norm_max() const {
    double m = 0.0;
    for (const auto& v : a_) m = std::max(m, std::abs(v));
    return m;
}

cplx ComplexMatrix::trace() const {
    cplx t = 0.0;
    std::size_t n = std::min(rows_, cols_);
    for (std::size_t i = 0; i < n; ++i) t += (*this)(i, i);
    return t;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

double ComplexMatrix::herm_defect() const {
    if (rows_ != cols_) throw std::invalid_argument("herm_defect: square matrix required");
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            s += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
    return std::sqrt(s);
}

ComplexMatrix ComplexMatrix::hermitize() const {
    if (rows_ != cols_) throw std::invalid_argument("hermitize: square matrix required");
    ComplexMatrix m(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        m(i, i) = 0.5 * ((*this)(i, i) + std::conj((*this)(i, i)));
        for (std::size_t j = i + 1; j < cols_; ++j) {
            cplx v = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
            m(i, j) = v;
            m(j, i) = std::conj(v);
        }
    }
    return m;
}

ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix m = x;
    m += y;
    return m;
}

ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix m = x;
    m -= y;
    return m;
}

ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.cols() != y.rows()) throw std::invalid_argument("matrix mul: shape mismatch");
    ComplexMatrix m(x.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            cplx xv = x(i, k);
            if (xv == cplx(0.0)) continue;
            for (std::size_t j = 0; j < y.cols(); ++j) m(i, j) += xv * y(k, j);
        }
    return m;
}

ComplexMatrix operator*(cplx s, const ComplexMatrix& x) {
    ComplexMatrix m = x;
    m *= s;
    return m;
}

cplx vdot(const ComplexMatrix& x, const ComplexMatrix& y) {
    if (x.cols() != 1 || y.cols() != 1 || x.rows() != y.rows())
        throw std::invalid_argument("vdot: column vectors of equal length required");
    cplx s = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) s += std::conj(x(i, 0)) * y(i, 0);
    return s;
}

}  // namespace blockpythag
