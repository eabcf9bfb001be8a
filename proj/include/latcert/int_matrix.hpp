#pragma once

// Dense matrices over the integers with exact arithmetic, and the normal-form
// machinery built on them: Smith decomposition, saturated kernels, integer
// linear system solving.  Everything downstream (cohomology, resolutions,
// certificates) reduces to these routines, so they carry their own
// verification hooks.

#include "latcert/common.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace latcert {

using Vec = std::vector<Int>;

class IntMatrix {
public:
    IntMatrix() : rows_(0), cols_(0) {}
    IntMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), e_(rows * cols) {}

    static IntMatrix identity(std::size_t n)
    {
        IntMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
        return m;
    }

    static IntMatrix from_rows(std::vector<Vec> rows)
    {
        std::size_t r = rows.size();
        std::size_t c = r ? rows[0].size() : 0;
        IntMatrix m(r, c);
        for (std::size_t i = 0; i < r; ++i) {
            require(rows[i].size() == c, "ragged row list");
            for (std::size_t j = 0; j < c; ++j) m.at(i, j) = std::move(rows[i][j]);
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    Int& at(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Int& at(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    bool operator==(const IntMatrix& o) const
    {
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }
    bool operator!=(const IntMatrix& o) const { return !(*this == o); }

    bool is_zero() const
    {
        return std::all_of(e_.begin(), e_.end(), [](const Int& x) { return x == 0; });
    }

    bool is_identity() const
    {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (at(i, j) != (i == j ? 1 : 0)) return false;
        return true;
    }

    IntMatrix transpose() const
    {
        IntMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
        return t;
    }

    IntMatrix operator*(const IntMatrix& b) const
    {
        require(cols_ == b.rows_, "matrix product: dimension mismatch");
        IntMatrix c(rows_, b.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const Int& a = at(i, k);
                if (a == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    const Int& x = b.at(k, j);
                    if (x != 0) c.at(i, j) += a * x;
                }
            }
        return c;
    }

    IntMatrix operator+(const IntMatrix& b) const
    {
        require(rows_ == b.rows_ && cols_ == b.cols_, "matrix sum: shape mismatch");
        IntMatrix c = *this;
        for (std::size_t i = 0; i < e_.size(); ++i) c.e_[i] += b.e_[i];
        return c;
    }

    IntMatrix operator-(const IntMatrix& b) const
    {
        require(rows_ == b.rows_ && cols_ == b.cols_, "matrix difference: shape mismatch");
        IntMatrix c = *this;
        for (std::size_t i = 0; i < e_.size(); ++i) c.e_[i] -= b.e_[i];
        return c;
    }

    IntMatrix operator-() const
    {
        IntMatrix c = *this;
        for (auto& x : c.e_) x = -x;
        return c;
    }

    Vec apply(const Vec& v) const
    {
        require(v.size() == cols_, "matrix apply: dimension mismatch");
        Vec out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (at(i, j) != 0 && v[j] != 0) out[i] += at(i, j) * v[j];
        return out;
    }

    Vec col(std::size_t j) const
    {
        Vec v(rows_);
        for (std::size_t i = 0; i < rows_; ++i) v[i] = at(i, j);
        return v;
    }

    void set_col(std::size_t j, const Vec& v)
    {
        require(v.size() == rows_, "set_col: dimension mismatch");
        for (std::size_t i = 0; i < rows_; ++i) at(i, j) = v[i];
    }

    Int trace() const
    {
        Int t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += at(i, i);
        return t;
    }

    /// Columns of a stacked side-by-side: [a | b].
    static IntMatrix hstack(const IntMatrix& a, const IntMatrix& b)
    {
        if (a.empty() && a.cols_ == 0) return b;
        if (b.empty() && b.cols_ == 0) return a;
        require(a.rows_ == b.rows_, "hstack: row mismatch");
        IntMatrix c(a.rows_, a.cols_ + b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t j = 0; j < a.cols_; ++j) c.at(i, j) = a.at(i, j);
            for (std::size_t j = 0; j < b.cols_; ++j) c.at(i, a.cols_ + j) = b.at(i, j);
        }
        return c;
    }

    static IntMatrix vstack(const IntMatrix& a, const IntMatrix& b)
    {
        if (a.empty() && a.rows_ == 0) return b;
        if (b.empty() && b.rows_ == 0) return a;
        require(a.cols_ == b.cols_, "vstack: column mismatch");
        IntMatrix c(a.rows_ + b.rows_, a.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) c.at(i, j) = a.at(i, j);
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) c.at(a.rows_ + i, j) = b.at(i, j);
        return c;
    }

    /// Block-diagonal sum.
    static IntMatrix block_diag(const IntMatrix& a, const IntMatrix& b)
    {
        IntMatrix c(a.rows_ + b.rows_, a.cols_ + b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j) c.at(i, j) = a.at(i, j);
        for (std::size_t i = 0; i < b.rows_; ++i)
            for (std::size_t j = 0; j < b.cols_; ++j) c.at(a.rows_ + i, a.cols_ + j) = b.at(i, j);
        return c;
    }

    IntMatrix submatrix(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        require(r0 + nr <= rows_ && c0 + nc <= cols_, "submatrix out of range");
        IntMatrix s(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            for (std::size_t j = 0; j < nc; ++j) s.at(i, j) = at(r0 + i, c0 + j);
        return s;
    }

private:
    std::size_t rows_, cols_;
    std::vector<Int> e_;
};

/// Fraction-free determinant (Bareiss).  Exact, no divisions besides exact ones.
inline Int det(const IntMatrix& a)
{
    require(a.rows() == a.cols(), "det: matrix not square");
    std::size_t n = a.rows();
    if (n == 0) return 1;
    IntMatrix m = a;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m.at(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m.at(p, k) == 0) ++p;
            if (p == n) return 0;
            for (std::size_t j = k; j < n; ++j) std::swap(m.at(k, j), m.at(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Int num = m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j);
                m.at(i, j) = num / prev; // exact by Bareiss
            }
        prev = m.at(k, k);
    }
    return sign > 0 ? m.at(n - 1, n - 1) : -m.at(n - 1, n - 1);
}

inline bool is_unimodular(const IntMatrix& a)
{
    if (a.rows() != a.cols()) return false;
    Int d = det(a);
    return d == 1 || d == -1;
}

struct SmithDecomposition {
    IntMatrix u, v;        // unimodular: u * a * v = d
    IntMatrix uinv, vinv;  // inverses, accumulated alongside
    IntMatrix d;           // diagonal
    std::vector<Int> divisors; // d1 | d2 | ..., zeros trailing
    std::size_t rank = 0;      // number of nonzero divisors
};

// Elimination to Smith normal form.  Pivot choice: minimal nonzero absolute
// value in the trailing submatrix, which keeps coefficient growth tame on the
// small dense instances this library works with.
inline SmithDecomposition smith_normal_form(const IntMatrix& a)
{
    const std::size_t m = a.rows(), n = a.cols();
    SmithDecomposition s;
    s.u = IntMatrix::identity(m);
    s.uinv = IntMatrix::identity(m);
    s.v = IntMatrix::identity(n);
    s.vinv = IntMatrix::identity(n);
    IntMatrix& d = s.d;
    d = a;

    auto swap_rows = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < n; ++k) std::swap(d.at(i, k), d.at(j, k));
        for (std::size_t k = 0; k < m; ++k) std::swap(s.u.at(i, k), s.u.at(j, k));
        for (std::size_t k = 0; k < m; ++k) std::swap(s.uinv.at(k, i), s.uinv.at(k, j));
    };
    auto swap_cols = [&](std::size_t i, std::size_t j) {
        if (i == j) return;
        for (std::size_t k = 0; k < m; ++k) std::swap(d.at(k, i), d.at(k, j));
        for (std::size_t k = 0; k < n; ++k) std::swap(s.v.at(k, i), s.v.at(k, j));
        for (std::size_t k = 0; k < n; ++k) std::swap(s.vinv.at(i, k), s.vinv.at(j, k));
    };
    // row i += c * row j ; U <- L U, Uinv <- Uinv L^-1
    auto add_row = [&](std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < n; ++k)
            if (d.at(j, k) != 0) d.at(i, k) += c * d.at(j, k);
        for (std::size_t k = 0; k < m; ++k)
            if (s.u.at(j, k) != 0) s.u.at(i, k) += c * s.u.at(j, k);
        for (std::size_t k = 0; k < m; ++k)
            if (s.uinv.at(k, i) != 0) s.uinv.at(k, j) -= c * s.uinv.at(k, i);
    };
    // col i += c * col j
    auto add_col = [&](std::size_t i, std::size_t j, const Int& c) {
        if (c == 0) return;
        for (std::size_t k = 0; k < m; ++k)
            if (d.at(k, j) != 0) d.at(k, i) += c * d.at(k, j);
        for (std::size_t k = 0; k < n; ++k)
            if (s.v.at(k, j) != 0) s.v.at(k, i) += c * s.v.at(k, j);
        for (std::size_t k = 0; k < n; ++k)
            if (s.vinv.at(i, k) != 0) s.vinv.at(j, k) -= c * s.vinv.at(i, k);
    };
    auto negate_row = [&](std::size_t i) {
        for (std::size_t k = 0; k < n; ++k) d.at(i, k) = -d.at(i, k);
        for (std::size_t k = 0; k < m; ++k) s.u.at(i, k) = -s.u.at(i, k);
        for (std::size_t k = 0; k < m; ++k) s.uinv.at(k, i) = -s.uinv.at(k, i);
    };

    const std::size_t nmin = std::min(m, n);
    for (std::size_t t = 0; t < nmin; ++t) {
        // locate minimal-absolute-value nonzero entry in trailing block
        std::size_t pi = t, pj = t;
        bool found = false;
        Int best = 0;
        for (std::size_t i = t; i < m; ++i)
            for (std::size_t j = t; j < n; ++j) {
                const Int& x = d.at(i, j);
                if (x == 0) continue;
                Int ax = abs(x);
                if (!found || ax < best) {
                    found = true;
                    best = ax;
                    pi = i;
                    pj = j;
                }
            }
        if (!found) break; // trailing block zero
        swap_rows(t, pi);
        swap_cols(t, pj);

        for (;;) {
            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (d.at(i, t) == 0) continue;
                Int q = d.at(i, t) / d.at(t, t);
                add_row(i, t, -q);
                if (d.at(i, t) != 0) {
                    // remainder smaller than pivot: promote it
                    swap_rows(t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (d.at(t, j) == 0) continue;
                Int q = d.at(t, j) / d.at(t, t);
                add_col(j, t, -q);
                if (d.at(t, j) != 0) {
                    swap_cols(t, j);
                    clean = false;
                }
            }
            if (clean) break;
        }

        // pivot must divide the whole trailing block for the divisor chain
        for (;;) {
            bool divides_all = true;
            for (std::size_t i = t + 1; i < m && divides_all; ++i)
                for (std::size_t j = t + 1; j < n && divides_all; ++j)
                    if (d.at(i, j) % d.at(t, t) != 0) {
                        add_row(t, i, 1);
                        divides_all = false;
                    }
            if (divides_all) break;
            // re-clear the row/column introduced by the row addition
            for (;;) {
                bool clean = true;
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (d.at(t, j) == 0) continue;
                    Int q = d.at(t, j) / d.at(t, t);
                    add_col(j, t, -q);
                    if (d.at(t, j) != 0) {
                        swap_cols(t, j);
                        clean = false;
                    }
                }
                for (std::size_t i = t + 1; i < m; ++i) {
                    if (d.at(i, t) == 0) continue;
                    Int q = d.at(i, t) / d.at(t, t);
                    add_row(i, t, -q);
                    if (d.at(i, t) != 0) {
                        swap_rows(t, i);
                        clean = false;
                    }
                }
                if (clean) break;
            }
        }
        if (d.at(t, t) < 0) negate_row(t);
    }

    s.divisors.assign(nmin, 0);
    for (std::size_t t = 0; t < nmin; ++t) {
        s.divisors[t] = d.at(t, t);
        if (s.divisors[t] != 0) s.rank = t + 1;
    }
    return s;
}

inline std::size_t rank(const IntMatrix& a)
{
    return smith_normal_form(a).rank;
}

/// Basis (columns) of the saturated integer kernel { x : A x = 0 }.
inline IntMatrix kernel_basis(const IntMatrix& a)
{
    SmithDecomposition s = smith_normal_form(a);
    std::size_t n = a.cols();
    std::size_t k = n - s.rank;
    IntMatrix basis(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) basis.at(i, j) = s.v.at(i, s.rank + j);
    return basis;
}

/// One integer solution of A x = b, if any.
inline std::optional<Vec> solve_integer(const SmithDecomposition& s, const Vec& b)
{
    require(b.size() == s.u.cols(), "solve_integer: dimension mismatch");
    Vec ub = s.u.apply(b);
    std::size_t n = s.v.rows();
    Vec y(n);
    for (std::size_t i = 0; i < ub.size(); ++i) {
        if (i < s.rank) {
            if (ub[i] % s.divisors[i] != 0) return std::nullopt;
            y[i] = ub[i] / s.divisors[i];
        } else if (ub[i] != 0) {
            return std::nullopt;
        }
    }
    return s.v.apply(y);
}

inline std::optional<Vec> solve_integer(const IntMatrix& a, const Vec& b)
{
    require(b.size() == a.rows(), "solve_integer: dimension mismatch");
    return solve_integer(smith_normal_form(a), b);
}

/// Solve A X = B columnwise; nullopt if any column has no integer solution.
inline std::optional<IntMatrix> solve_integer_matrix(const IntMatrix& a, const IntMatrix& b)
{
    require(a.rows() == b.rows(), "solve_integer_matrix: row mismatch");
    SmithDecomposition s = smith_normal_form(a);
    IntMatrix x(a.cols(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        auto xe = solve_integer(s, b.col(j));
        if (!xe) return std::nullopt;
        x.set_col(j, *xe);
    }
    return x;
}

/// Inverse of a unimodular matrix: with U A V = 1, A^-1 = V U.
inline IntMatrix unimodular_inverse(const IntMatrix& a)
{
    require(a.rows() == a.cols(), "inverse: matrix not square");
    SmithDecomposition s = smith_normal_form(a);
    verify(s.rank == a.rows(), "inverse: matrix singular");
    for (std::size_t i = 0; i < s.rank; ++i)
        verify(s.divisors[i] == 1, "inverse: matrix not unimodular");
    return s.v * s.u;
}

/// True when the columns of A generate a saturated (primitive) sublattice,
/// i.e. the quotient by their span is torsion-free.
inline bool columns_saturated(const IntMatrix& a)
{
    SmithDecomposition s = smith_normal_form(a);
    for (std::size_t i = 0; i < s.rank; ++i)
        if (s.divisors[i] != 1) return false;
    return true;
}

/// Invariant factors != 1 of coker(A : Z^cols -> Z^rows).  Infinite quotients
/// (rank deficit) are reported by the caller's own checks; here any missing
/// rank appears as a 0 factor.
inline std::vector<Int> cokernel_invariants(const IntMatrix& a)
{
    SmithDecomposition s = smith_normal_form(a);
    std::vector<Int> inv;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Int d = i < s.divisors.size() ? s.divisors[i] : Int(0);
        if (d != 1) inv.push_back(d);
    }
    return inv;
}

} // namespace latcert
