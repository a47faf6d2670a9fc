#pragma once

#include <cstddef>
#include <sstream>
#include <string>
#include <vector>

#include "microlocal/exactalg/ring.hpp"

namespace microlocal::exactalg {

/// Dense matrix of exact scalars over a Ring, row-major. A rows×cols matrix
/// represents a map R^cols → R^rows acting on column vectors.
class Matrix
{
public:
    Matrix() : ring_(Ring::rationals()) {}

    Matrix(Ring ring, std::size_t rows, std::size_t cols)
        : ring_(ring), rows_(rows), cols_(cols), data_(rows * cols)
    {
    }

    static Matrix identity(Ring ring, std::size_t n)
    {
        Matrix m(ring, n, n);
        for (std::size_t i = 0; i < n; ++i)
            m.data_[i * n + i] = 1;
        return m;
    }

    /// Builds from row lists, reducing every entry into the ring. An empty row
    /// list yields a 0×cols matrix.
    static Matrix from_rows(Ring ring, const std::vector<std::vector<Rational>>& rows,
                            std::size_t cols_if_empty = 0)
    {
        std::size_t cols = rows.empty() ? cols_if_empty : rows.front().size();
        Matrix m(ring, rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != cols)
                throw InvalidInput("ragged matrix rows");
            for (std::size_t j = 0; j < cols; ++j)
                m.data_[i * cols + j] = ring.reduce(rows[i][j]);
        }
        return m;
    }

    static Matrix column_vector(Ring ring, const std::vector<Rational>& v)
    {
        Matrix m(ring, v.size(), 1);
        for (std::size_t i = 0; i < v.size(); ++i)
            m.data_[i] = ring.reduce(v[i]);
        return m;
    }

    const Ring& ring() const { return ring_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void set(std::size_t i, std::size_t j, const Rational& v) { data_[i * cols_ + j] = ring_.reduce(v); }

    bool is_zero() const
    {
        for (const auto& x : data_)
            if (x != 0)
                return false;
        return true;
    }

    std::vector<Rational> column(std::size_t j) const
    {
        std::vector<Rational> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            out[i] = data_[i * cols_ + j];
        return out;
    }

    Matrix transpose() const
    {
        Matrix t(ring_, cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t.data_[j * rows_ + i] = data_[i * cols_ + j];
        return t;
    }

    Matrix scaled(const Rational& c) const
    {
        Matrix out(*this);
        Rational cr = ring_.reduce(c);
        for (auto& x : out.data_)
            x = ring_.mul(x, cr);
        return out;
    }

    /// Rows [r0, r1) and columns [c0, c1).
    Matrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const
    {
        Matrix out(ring_, r1 - r0, c1 - c0);
        for (std::size_t i = r0; i < r1; ++i)
            for (std::size_t j = c0; j < c1; ++j)
                out.data_[(i - r0) * out.cols_ + (j - c0)] = data_[i * cols_ + j];
        return out;
    }

    Matrix select_rows(const std::vector<std::size_t>& idx) const
    {
        Matrix out(ring_, idx.size(), cols_);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out.data_[i * cols_ + j] = data_[idx[i] * cols_ + j];
        return out;
    }

    Matrix select_cols(const std::vector<std::size_t>& idx) const
    {
        Matrix out(ring_, rows_, idx.size());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                out.data_[i * idx.size() + j] = data_[i * cols_ + idx[j]];
        return out;
    }

    /// Writes `m` into this matrix with its top-left corner at (r, c).
    void paste(const Matrix& m, std::size_t r, std::size_t c)
    {
        for (std::size_t i = 0; i < m.rows_; ++i)
            for (std::size_t j = 0; j < m.cols_; ++j)
                data_[(r + i) * cols_ + (c + j)] = m.data_[i * m.cols_ + j];
    }

    static Matrix hstack(const Matrix& a, const Matrix& b)
    {
        check_ring(a, b);
        if (a.rows_ != b.rows_)
            throw InvalidInput("hstack: row mismatch");
        Matrix out(a.ring_, a.rows_, a.cols_ + b.cols_);
        out.paste(a, 0, 0);
        out.paste(b, 0, a.cols_);
        return out;
    }

    static Matrix vstack(const Matrix& a, const Matrix& b)
    {
        check_ring(a, b);
        if (a.cols_ != b.cols_)
            throw InvalidInput("vstack: column mismatch");
        Matrix out(a.ring_, a.rows_ + b.rows_, a.cols_);
        out.paste(a, 0, 0);
        out.paste(b, a.rows_, 0);
        return out;
    }

    static Matrix direct_sum(const Matrix& a, const Matrix& b)
    {
        check_ring(a, b);
        Matrix out(a.ring_, a.rows_ + b.rows_, a.cols_ + b.cols_);
        out.paste(a, 0, 0);
        out.paste(b, a.rows_, a.cols_);
        return out;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        check_ring(a, b);
        if (a.cols_ != b.rows_)
            throw InvalidInput("matrix product shape mismatch: " + a.shape() + " * " + b.shape());
        Matrix out(a.ring_, a.rows_, b.cols_);
        const Ring& r = a.ring_;
        std::vector<std::vector<std::size_t>> support(b.rows_);
        for (std::size_t k = 0; k < b.rows_; ++k)
            for (std::size_t j = 0; j < b.cols_; ++j)
                if (b.data_[k * b.cols_ + j] != 0)
                    support[k].push_back(j);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a.data_[i * a.cols_ + k];
                if (aik == 0)
                    continue;
                for (std::size_t j : support[k]) {
                    auto& o = out.data_[i * b.cols_ + j];
                    o = r.add(o, r.mul(aik, b.data_[k * b.cols_ + j]));
                }
            }
        return out;
    }

    std::vector<Rational> apply(const std::vector<Rational>& v) const
    {
        if (v.size() != cols_)
            throw InvalidInput("matrix-vector shape mismatch");
        std::vector<Rational> out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) {
                const Rational& a = data_[i * cols_ + j];
                if (a != 0 && v[j] != 0)
                    out[i] = ring_.add(out[i], ring_.mul(a, v[j]));
            }
        return out;
    }

    friend Matrix operator+(const Matrix& a, const Matrix& b)
    {
        check_same_shape(a, b);
        Matrix out(a);
        for (std::size_t i = 0; i < out.data_.size(); ++i)
            out.data_[i] = a.ring_.add(a.data_[i], b.data_[i]);
        return out;
    }

    friend Matrix operator-(const Matrix& a, const Matrix& b)
    {
        check_same_shape(a, b);
        Matrix out(a);
        for (std::size_t i = 0; i < out.data_.size(); ++i)
            out.data_[i] = a.ring_.sub(a.data_[i], b.data_[i]);
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.ring_ == b.ring_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    std::string str() const
    {
        std::ostringstream os;
        os << "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            os << (i ? "; " : "");
            for (std::size_t j = 0; j < cols_; ++j)
                os << (j ? " " : "") << data_[i * cols_ + j];
        }
        os << "]";
        return os.str();
    }

    // Elementary operations; the reduction routines drive these directly.

    void swap_rows(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t j = 0; j < cols_; ++j)
            std::swap(data_[a * cols_ + j], data_[b * cols_ + j]);
    }

    void swap_cols(std::size_t a, std::size_t b)
    {
        if (a == b)
            return;
        for (std::size_t i = 0; i < rows_; ++i)
            std::swap(data_[i * cols_ + a], data_[i * cols_ + b]);
    }

    /// row[dst] += c · row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const Rational& c)
    {
        if (c == 0)
            return;
        for (std::size_t j = 0; j < cols_; ++j) {
            const Rational& s = data_[src * cols_ + j];
            if (s != 0)
                data_[dst * cols_ + j] = ring_.add(data_[dst * cols_ + j], ring_.mul(c, s));
        }
    }

    /// col[dst] += c · col[src]
    void add_col_multiple(std::size_t dst, std::size_t src, const Rational& c)
    {
        if (c == 0)
            return;
        for (std::size_t i = 0; i < rows_; ++i) {
            const Rational& s = data_[i * cols_ + src];
            if (s != 0)
                data_[i * cols_ + dst] = ring_.add(data_[i * cols_ + dst], ring_.mul(c, s));
        }
    }

    void scale_row(std::size_t r, const Rational& c)
    {
        for (std::size_t j = 0; j < cols_; ++j)
            data_[r * cols_ + j] = ring_.mul(data_[r * cols_ + j], c);
    }

    void scale_col(std::size_t c, const Rational& f)
    {
        for (std::size_t i = 0; i < rows_; ++i)
            data_[i * cols_ + c] = ring_.mul(data_[i * cols_ + c], f);
    }

private:
    static void check_ring(const Matrix& a, const Matrix& b)
    {
        if (!(a.ring_ == b.ring_))
            throw InvalidInput("ring mismatch: " + a.ring_.name() + " vs " + b.ring_.name());
    }

    static void check_same_shape(const Matrix& a, const Matrix& b)
    {
        check_ring(a, b);
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_)
            throw InvalidInput("shape mismatch: " + a.shape() + " vs " + b.shape());
    }

    Ring ring_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

} // namespace microlocal::exactalg
