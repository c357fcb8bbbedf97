#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "gck/error.hpp"

namespace gck {

// Exact integer scalar.  All linear algebra in this library is over Z,
// with no overflow: intermediate values in normal form computations can
// exceed 64 bits even for small inputs.
using Int = boost::multiprecision::cpp_int;
using Vec = std::vector<Int>;

// Dense matrix over Z.  Degenerate shapes (0 x n, n x 0, 0 x 0) are
// first-class: they show up constantly as presentations of free and
// trivial groups.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * cols) {}

    static IntMatrix identity(std::size_t n);
    static IntMatrix zero(std::size_t rows, std::size_t cols) { return IntMatrix(rows, cols); }
    // Row-major literal, handy in tests: IntMatrix::of({{1,2},{3,4}}).
    static IntMatrix of(std::initializer_list<std::initializer_list<long long>> rows);
    static IntMatrix column(const Vec& v);
    static IntMatrix diagonal(const Vec& d);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Int& at(std::size_t r, std::size_t c) { return a_[r * cols_ + c]; }
    const Int& at(std::size_t r, std::size_t c) const { return a_[r * cols_ + c]; }

    bool operator==(const IntMatrix& o) const = default;

    bool is_zero() const;
    bool is_identity() const;

    IntMatrix transpose() const;
    IntMatrix operator*(const IntMatrix& o) const;
    IntMatrix operator+(const IntMatrix& o) const;
    IntMatrix operator-(const IntMatrix& o) const;
    IntMatrix operator-() const;
    Vec apply(const Vec& v) const;  // this * v

    Vec row(std::size_t i) const;
    Vec col(std::size_t j) const;
    void set_row(std::size_t i, const Vec& v);
    void set_col(std::size_t j, const Vec& v);

    // Elementary unimodular operations (in place).
    void swap_rows(std::size_t i, std::size_t j);
    void swap_cols(std::size_t i, std::size_t j);
    void add_row(std::size_t dst, std::size_t src, const Int& c);  // row dst += c * row src
    void add_col(std::size_t dst, std::size_t src, const Int& c);  // col dst += c * col src
    void negate_row(std::size_t i);
    void negate_col(std::size_t j);

    // Submatrix by explicit index lists (repetitions allowed).
    IntMatrix select(const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols) const;

    // Exact determinant by fraction-free (Bareiss) elimination.
    Int det() const;

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Int> a_;
};

// Block concatenation.  Shapes must conform; a 0-row/0-col block is fine.
IntMatrix hcat(const IntMatrix& a, const IntMatrix& b);
IntMatrix vcat(const IntMatrix& a, const IntMatrix& b);

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec scale(const Int& c, const Vec& v);
bool is_zero(const Vec& v);
Vec concat(const Vec& a, const Vec& b);

std::string to_string(const Vec& v);

} // namespace gck
