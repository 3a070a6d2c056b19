#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace blockpythag {

using cplx = std::complex<double>;

// Dense complex matrix, row-major storage. All routines in this library
// assume modest sizes (tests go up to 64x64), so everything is O(n^3)
// textbook code with deterministic operation order.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data);

    // Row-major nested initializer, e.g. {{1,2},{3,4}}.
    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> init);

    static ComplexMatrix identity(std::size_t n);
    static ComplexMatrix zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    cplx& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    ComplexMatrix adjoint() const;
    ComplexMatrix transpose() const;
    ComplexMatrix conj() const;

    ComplexMatrix col(std::size_t j) const;
    // Columns [begin, begin+count).
    ComplexMatrix col_range(std::size_t begin, std::size_t count) const;
    void set_col(std::size_t j, const ComplexMatrix& v);

    ComplexMatrix& operator+=(const ComplexMatrix& o);
    ComplexMatrix& operator-=(const ComplexMatrix& o);
    ComplexMatrix& operator*=(cplx s);

    double norm_fro() const;
    double norm_max() const;  // max entrywise modulus
    cplx trace() const;
    bool all_finite() const;
    double herm_defect() const;  // ||A - A*||_F, square only

    // (A + A*)/2, enforcing exact hermitian symmetry of the result.
    ComplexMatrix hermitize() const;

    bool same_shape(const ComplexMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> a_;
};

ComplexMatrix operator+(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator-(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator*(const ComplexMatrix& x, const ComplexMatrix& y);
ComplexMatrix operator*(cplx s, const ComplexMatrix& x);

// conj(x)^T y for column vectors stored as n x 1 matrices.
cplx vdot(const ComplexMatrix& x, const ComplexMatrix& y);

}  // namespace blockpythag
