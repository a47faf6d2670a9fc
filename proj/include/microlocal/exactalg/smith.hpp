#pragma once

#include <optional>
#include <vector>

#include "microlocal/exactalg/matrix.hpp"

namespace microlocal::exactalg {

/// left · m · right = diagonal, with left/right invertible over the ring and
/// the diagonal entries d_0 | d_1 | … | d_{rank-1} nonzero and canonical
/// (positive over ℤ, 1 over a field). Inverses are tracked alongside so that
/// callers never need to invert a transform themselves.
struct SmithForm
{
    Matrix diagonal;
    Matrix left;
    Matrix left_inverse;
    Matrix right;
    Matrix right_inverse;
    std::size_t rank = 0;

    std::vector<Rational> divisors() const
    {
        std::vector<Rational> d;
        for (std::size_t i = 0; i < rank; ++i)
            d.push_back(diagonal(i, i));
        return d;
    }
};

/// Which transforms to accumulate; skipping unused ones saves most of the work
/// on large section complexes.
struct SmithOptions
{
    bool left = true;
    bool right = true;
};

namespace detail {

// Smallest-norm nonzero entry of the trailing block; ties go to the first in
// row-major order, which over a field is simply the first nonzero entry.
inline bool find_pivot(const Matrix& d, std::size_t t, std::size_t& pi, std::size_t& pj)
{
    const Ring& ring = d.ring();
    bool found = false;
    for (std::size_t i = t; i < d.rows(); ++i)
        for (std::size_t j = t; j < d.cols(); ++j) {
            const Rational& x = d(i, j);
            if (x == 0)
                continue;
            if (!found || ring.norm_less(x, d(pi, pj))) {
                pi = i;
                pj = j;
                found = true;
                if (ring.is_field() || ring.is_unit(x))
                    return true;
            }
        }
    return found;
}

} // namespace detail

inline SmithForm smith_normal_form(const Matrix& m, SmithOptions opts = {})
{
    const Ring& ring = m.ring();
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    SmithForm out;
    out.diagonal = m;
    Matrix& d = out.diagonal;
    if (opts.left) {
        out.left = Matrix::identity(ring, rows);
        out.left_inverse = Matrix::identity(ring, rows);
    }
    if (opts.right) {
        out.right = Matrix::identity(ring, cols);
        out.right_inverse = Matrix::identity(ring, cols);
    }

    auto row_add = [&](std::size_t dst, std::size_t src, const Rational& c) {
        // row_dst += c row_src  ⇒  U ← E U,  U⁻¹ ← U⁻¹ E⁻¹
        d.add_row_multiple(dst, src, c);
        if (opts.left) {
            out.left.add_row_multiple(dst, src, c);
            out.left_inverse.add_col_multiple(src, dst, ring.neg(c));
        }
    };
    auto col_add = [&](std::size_t dst, std::size_t src, const Rational& c) {
        d.add_col_multiple(dst, src, c);
        if (opts.right) {
            out.right.add_col_multiple(dst, src, c);
            out.right_inverse.add_row_multiple(src, dst, ring.neg(c));
        }
    };
    auto row_swap = [&](std::size_t a, std::size_t b) {
        d.swap_rows(a, b);
        if (opts.left) {
            out.left.swap_rows(a, b);
            out.left_inverse.swap_cols(a, b);
        }
    };
    auto col_swap = [&](std::size_t a, std::size_t b) {
        d.swap_cols(a, b);
        if (opts.right) {
            out.right.swap_cols(a, b);
            out.right_inverse.swap_rows(a, b);
        }
    };

    std::size_t t = 0;
    const std::size_t limit = std::min(rows, cols);
    for (; t < limit; ++t) {
        std::size_t pi = t, pj = t;
        if (!detail::find_pivot(d, t, pi, pj))
            break;
        for (;;) {
            row_swap(t, pi);
            col_swap(t, pj);
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (d(i, t) == 0)
                    continue;
                auto [q, r] = ring.divmod(d(i, t), d(t, t));
                row_add(i, t, ring.neg(q));
                if (r != 0)
                    clean = false;
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (d(t, j) == 0)
                    continue;
                auto [q, r] = ring.divmod(d(t, j), d(t, t));
                col_add(j, t, ring.neg(q));
                if (r != 0)
                    clean = false;
            }
            if (!clean) {
                // a remainder is now smaller than the pivot; restart on it
                pi = t;
                pj = t;
                for (std::size_t i = t + 1; i < rows; ++i)
                    if (d(i, t) != 0 && ring.norm_less(d(i, t), d(pi, pj))) {
                        pi = i;
                        pj = t;
                    }
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d(t, j) != 0 && ring.norm_less(d(t, j), d(pi, pj))) {
                        pi = t;
                        pj = j;
                    }
                continue;
            }
            if (ring.is_field())
                break;
            // divisibility of the trailing block by the pivot
            bool divisible = true;
            for (std::size_t i = t + 1; i < rows && divisible; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d(i, j) != 0 && !ring.divides(d(t, t), d(i, j))) {
                        row_add(t, i, Rational(1));
                        divisible = false;
                        break;
                    }
            if (divisible)
                break;
            pi = t;
            pj = t;
        }
        Rational u = ring.normalizing_unit(d(t, t));
        if (u != 1) {
            d.scale_row(t, u);
            if (opts.left) {
                out.left.scale_row(t, u);
                out.left_inverse.scale_col(t, ring.inverse(u));
            }
        }
    }
    out.rank = t;
    return out;
}

/// Reduced row echelon form over a field: `reduced` has a 1 in column
/// pivots[i] of row i and zeros elsewhere in that column; rows past the rank
/// are zero.
struct RowEchelon
{
    Matrix reduced;
    std::vector<std::size_t> pivots;
};

inline RowEchelon row_reduce(const Matrix& m)
{
    const Ring& ring = m.ring();
    if (!ring.is_field())
        throw PreconditionError("row reduction needs a field");
    RowEchelon out{m, {}};
    Matrix& r = out.reduced;
    std::size_t row = 0;
    for (std::size_t col = 0; col < r.cols() && row < r.rows(); ++col) {
        std::size_t p = row;
        while (p < r.rows() && r(p, col) == 0)
            ++p;
        if (p == r.rows())
            continue;
        r.swap_rows(row, p);
        Rational inv = ring.inverse(r(row, col));
        if (inv != 1)
            r.scale_row(row, inv);
        for (std::size_t i = 0; i < r.rows(); ++i)
            if (i != row && r(i, col) != 0)
                r.add_row_multiple(i, row, ring.neg(r(i, col)));
        out.pivots.push_back(col);
        ++row;
    }
    return out;
}

inline std::size_t rank(const Matrix& m)
{
    if (m.ring().is_field())
        return row_reduce(m).pivots.size();
    return smith_normal_form(m, {.left = false, .right = false}).rank;
}

/// Columns form a basis of ker m (a free direct summand of the domain).
inline Matrix kernel_basis(const Matrix& m)
{
    SmithForm s = smith_normal_form(m, {.left = false, .right = true});
    return s.right.block(0, m.cols(), s.rank, m.cols());
}

/// Solves a·x = b over the ring; nullopt when no solution exists.
inline std::optional<Matrix> solve(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows())
        throw InvalidInput("solve: row mismatch");
    const Ring& ring = a.ring();
    SmithForm s = smith_normal_form(a);
    Matrix ub = s.left * b;
    Matrix y(ring, a.cols(), b.cols());
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const Rational& v = ub(i, c);
            if (i < s.rank) {
                const Rational& di = s.diagonal(i, i);
                if (!ring.divides(di, v))
                    return std::nullopt;
                y.set(i, c, ring.divmod(v, di).first);
            } else if (v != 0) {
                return std::nullopt;
            }
        }
    }
    return s.right * y;
}

/// True when every column of b lies in the column span of a.
inline bool column_span_contains(const Matrix& a, const Matrix& b)
{
    return solve(a, b).has_value();
}

inline bool is_surjective_matrix(const Matrix& m)
{
    SmithForm s = smith_normal_form(m, {.left = false, .right = false});
    if (s.rank != m.rows())
        return false;
    for (std::size_t i = 0; i < s.rank; ++i)
        if (!m.ring().is_unit(s.diagonal(i, i)))
            return false;
    return true;
}

inline bool is_invertible_matrix(const Matrix& m)
{
    return m.rows() == m.cols() && is_surjective_matrix(m);
}

} // namespace microlocal::exactalg
