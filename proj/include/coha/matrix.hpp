#pragma once

#include "coha/field.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace coha {

// Dense matrix over a small finite field.  Row-major, value semantics.
// Sizes stay tiny (n <= 4 outside, n^2 <= 16 for flattened commutator
// operators), so nothing here tries to be clever.
template <class F>
struct Matrix {
    using Elem = typename F::Elem;

    F field;
    int rows = 0, cols = 0;
    std::vector<Elem> a;  // rows*cols entries, row-major

    Matrix(F f, int r, int c) : field(f), rows(r), cols(c), a(std::size_t(r) * c, f.zero()) {
        if (r < 0 || c < 0) throw PreconditionError("Matrix: negative size");
    }

    static Matrix zero(F f, int n) { return Matrix(f, n, n); }
    static Matrix identity(F f, int n) {
        Matrix m(f, n, n);
        for (int i = 0; i < n; ++i) m(i, i) = f.one();
        return m;
    }

    Elem& operator()(int i, int j) { return a[std::size_t(i) * cols + j]; }
    const Elem& operator()(int i, int j) const { return a[std::size_t(i) * cols + j]; }

    bool is_zero() const {
        for (Elem x : a)
            if (x != field.zero()) return false;
        return true;
    }

    bool operator==(const Matrix& o) const {
        return rows == o.rows && cols == o.cols && a == o.a;
    }

    Matrix operator+(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = field.add(a[i], o.a[i]);
        return r;
    }
    Matrix operator-(const Matrix& o) const {
        require_same_shape(o);
        Matrix r = *this;
        for (std::size_t i = 0; i < a.size(); ++i) r.a[i] = field.sub(a[i], o.a[i]);
        return r;
    }
    Matrix operator*(const Matrix& o) const {
        if (cols != o.rows) throw PreconditionError("Matrix::mul: shape mismatch");
        Matrix r(field, rows, o.cols);
        for (int i = 0; i < rows; ++i)
            for (int k = 0; k < cols; ++k) {
                Elem aik = (*this)(i, k);
                if (aik == field.zero()) continue;
                for (int j = 0; j < o.cols; ++j)
                    r(i, j) = field.add(r(i, j), field.mul(aik, o(k, j)));
            }
        return r;
    }
    Matrix scaled(Elem c) const {
        Matrix r = *this;
        for (auto& x : r.a) x = field.mul(x, c);
        return r;
    }

    // A^e by direct multiplication; exponents stay <= 4.
    Matrix pow(unsigned e) const {
        if (rows != cols) throw PreconditionError("Matrix::pow: not square");
        Matrix r = identity(field, rows);
        for (unsigned i = 0; i < e; ++i) r = r * (*this);
        return r;
    }

    bool is_nilpotent() const { return pow(unsigned(rows)).is_zero(); }

    void require_same_shape(const Matrix& o) const {
        if (rows != o.rows || cols != o.cols)
            throw PreconditionError("Matrix: shape mismatch");
    }

    // Mixed-radix encoding of the entry list; used for enumeration loops
    // and for orbit hash sets.  Only valid when order()^(rows*cols) fits.
    std::uint64_t to_index() const {
        std::uint64_t idx = 0, q = field.order();
        for (Elem x : a) idx = idx * q + field.to_index(x);
        return idx;
    }
    static Matrix from_index(F f, int r, int c, std::uint64_t idx) {
        Matrix m(f, r, c);
        std::uint64_t q = f.order();
        for (std::size_t i = m.a.size(); i-- > 0;) {
            m.a[i] = f.from_index(idx % q);
            idx /= q;
        }
        return m;
    }
};

// Number of r x c matrices over the field, as a checked uint64.
template <class F>
std::uint64_t matrix_space_size(F f, int r, int c) {
    std::uint64_t n = 1, q = f.order();
    for (int i = 0; i < r * c; ++i) {
        if (n > UINT64_MAX / q) throw InfeasibleError("matrix space too large to enumerate");
        n *= q;
    }
    return n;
}

// Row echelon reduction in place; returns the rank.  Over a field this is
// exact division-by-pivot elimination.
template <class F>
int reduce_in_place(Matrix<F>& m) {
    const F& f = m.field;
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int i = rank; i < m.rows; ++i)
            if (m(i, col) != f.zero()) {
                pivot = i;
                break;
            }
        if (pivot < 0) continue;
        for (int j = 0; j < m.cols; ++j) std::swap(m(pivot, j), m(rank, j));
        typename F::Elem inv = f.inv(m(rank, col));
        for (int j = col; j < m.cols; ++j) m(rank, j) = f.mul(m(rank, j), inv);
        for (int i = 0; i < m.rows; ++i) {
            if (i == rank || m(i, col) == f.zero()) continue;
            typename F::Elem factor = m(i, col);
            for (int j = col; j < m.cols; ++j)
                m(i, j) = f.sub(m(i, j), f.mul(factor, m(rank, j)));
        }
        ++rank;
    }
    return rank;
}

template <class F>
int rank(Matrix<F> m) {
    return reduce_in_place(m);
}

// Basis of {v : M v = 0}, one basis vector per row of the result.
// The basis has cols - rank rows by construction.
template <class F>
Matrix<F> kernel_basis(Matrix<F> m) {
    const F f = m.field;
    const int n = m.cols;
    int rk = reduce_in_place(m);

    std::vector<int> pivot_col;
    std::vector<bool> is_pivot(n, false);
    for (int i = 0; i < rk; ++i) {
        int j = 0;
        while (j < n && m(i, j) == f.zero()) ++j;
        pivot_col.push_back(j);
        is_pivot[j] = true;
    }

    Matrix<F> basis(f, n - rk, n);
    int row = 0;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        basis(row, free) = f.one();
        for (int i = 0; i < rk; ++i)
            basis(row, pivot_col[i]) = f.neg(m(i, free));
        ++row;
    }
    return basis;
}

template <class F>
std::optional<Matrix<F>> inverse(const Matrix<F>& m) {
    if (m.rows != m.cols) throw PreconditionError("inverse: not square");
    const F& f = m.field;
    int n = m.rows;
    Matrix<F> aug(f, n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = f.one();
    }
    reduce_in_place(aug);
    // singular input: elimination ran into the identity block
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (aug(i, j) != (i == j ? f.one() : f.zero())) return std::nullopt;
    Matrix<F> r(f, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r(i, j) = aug(i, n + j);
    return r;
}

template <class F>
bool is_invertible(const Matrix<F>& m) {
    return m.rows == m.cols && rank(m) == m.rows;
}

// The commutator operator ad_A : X -> AX - XA on n x n matrices, flattened
// row-major to an n^2 x n^2 matrix: ad(A) * vec(X) = vec(AX - XA).
template <class F>
Matrix<F> adjoint_operator(const Matrix<F>& A) {
    if (A.rows != A.cols) throw PreconditionError("adjoint_operator: not square");
    const F& f = A.field;
    const int n = A.rows;
    Matrix<F> ad(f, n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int row = i * n + j;
            // (AX)_{ij} = sum_k A_{ik} X_{kj}
            for (int k = 0; k < n; ++k)
                ad(row, k * n + j) = f.add(ad(row, k * n + j), A(i, k));
            // -(XA)_{ij} = -sum_k X_{ik} A_{kj}
            for (int k = 0; k < n; ++k)
                ad(row, i * n + k) = f.sub(ad(row, i * n + k), A(k, j));
        }
    return ad;
}

template <class F>
std::vector<typename F::Elem> flatten(const Matrix<F>& m) {
    return m.a;
}

template <class F>
Matrix<F> unflatten(F f, int n, const std::vector<typename F::Elem>& v) {
    Matrix<F> m(f, n, n);
    m.a = v;
    return m;
}

// Linear combination of the rows of `basis` with the digits of `idx` in
// base order(); walks through the whole row space as idx runs over
// order()^rows values.
template <class F>
std::vector<typename F::Elem> row_combination(const Matrix<F>& basis, std::uint64_t idx) {
    const F& f = basis.field;
    std::vector<typename F::Elem> v(basis.cols, f.zero());
    std::uint64_t q = f.order();
    for (int r = basis.rows; r-- > 0;) {
        typename F::Elem c = f.from_index(idx % q);
        idx /= q;
        if (c == f.zero()) continue;
        for (int j = 0; j < basis.cols; ++j)
            v[j] = f.add(v[j], f.mul(c, basis(r, j)));
    }
    return v;
}

}  // namespace coha
