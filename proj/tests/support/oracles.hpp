#pragma once

// Independent reference computations used to freeze expected values and to
// cross-check the library. Nothing here calls into the Smith reduction.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "microlocal/exactalg.hpp"

namespace oracle {

using microlocal::Integer;
using microlocal::Rational;
using Grid = std::vector<std::vector<Rational>>;

inline Grid to_grid(const microlocal::exactalg::Matrix& m)
{
    Grid g(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            g[i][j] = m(i, j);
    return g;
}

/// Rank over ℚ by plain Gaussian elimination.
inline std::size_t rank_q(Grid g)
{
    std::size_t r = 0;
    const std::size_t rows = g.size(), cols = rows ? g[0].size() : 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && g[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(g[p], g[r]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && g[i][c] != 0) {
                Rational f = g[i][c] / g[r][c];
                for (std::size_t j = c; j < cols; ++j)
                    g[i][j] -= f * g[r][j];
            }
        ++r;
    }
    return r;
}

/// Rank over 𝔽_p on int64 residues.
inline std::size_t rank_mod_p(const Grid& in, std::int64_t p)
{
    const std::size_t rows = in.size(), cols = rows ? in[0].size() : 0;
    std::vector<std::vector<std::int64_t>> g(rows, std::vector<std::int64_t>(cols));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            Integer n = numerator(in[i][j]) % p;
            if (n < 0)
                n += p;
            g[i][j] = n.convert_to<std::int64_t>();
        }
    auto inv = [p](std::int64_t a) {
        std::int64_t r = 1, e = p - 2;
        while (e > 0) {
            if (e & 1)
                r = r * a % p;
            a = a * a % p;
            e >>= 1;
        }
        return r;
    };
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t q = r;
        while (q < rows && g[q][c] == 0)
            ++q;
        if (q == rows)
            continue;
        std::swap(g[q], g[r]);
        std::int64_t iv = inv(g[r][c]);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && g[i][c] != 0) {
                std::int64_t f = g[i][c] * iv % p;
                for (std::size_t j = c; j < cols; ++j)
                    g[i][j] = ((g[i][j] - f * g[r][j]) % p + p) % p;
            }
        ++r;
    }
    return r;
}

inline std::size_t rank(const microlocal::exactalg::Matrix& m)
{
    if (m.ring().kind() == microlocal::exactalg::Ring::Kind::prime_field)
        return rank_mod_p(to_grid(m), m.ring().characteristic());
    return rank_q(to_grid(m));
}

/// Determinant by cofactor-free Bareiss on integers.
inline Integer det_int(std::vector<std::vector<Integer>> a)
{
    const std::size_t n = a.size();
    if (n == 0)
        return 1;
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0)
                ++s;
            if (s == n)
                return 0;
            std::swap(a[s], a[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>>& out)
{
    std::vector<std::size_t> cur;
    auto rec = [&](auto&& self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

/// Elementary divisors over ℤ from determinantal divisors: d_k = D_k / D_{k-1},
/// D_k = gcd of all k×k minors. Returns the nonzero divisors in order.
inline std::vector<Integer> elementary_divisors(const Grid& g)
{
    const std::size_t rows = g.size(), cols = rows ? g[0].size() : 0;
    std::vector<Integer> D{1};
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        subsets(rows, k, rs);
        subsets(cols, k, cs);
        Integer gk = 0;
        for (auto& r : rs)
            for (auto& c : cs) {
                std::vector<std::vector<Integer>> a(k, std::vector<Integer>(k));
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j)
                        a[i][j] = numerator(g[r[i]][c[j]]);
                gk = gcd(gk, det_int(a));
                if (gk == D.back() && gk == 1)
                    break;
            }
        if (gk == 0)
            break;
        D.push_back(abs(gk));
    }
    std::vector<Integer> out;
    for (std::size_t k = 1; k < D.size(); ++k)
        out.push_back(D[k] / D[k - 1]);
    return out;
}

/// Cohomology invariants of one degree: free rank plus non-unit torsion
/// (torsion always empty over a field).
struct Invariants
{
    std::size_t free = 0;
    std::vector<Integer> torsion;
    bool operator==(const Invariants&) const = default;
};

inline Invariants cohomology(const microlocal::exactalg::ChainComplex& c, int j)
{
    Invariants inv;
    std::size_t n = c.dim(j);
    std::size_t r_out = oracle::rank(c.differential(j));
    std::size_t r_in = oracle::rank(c.differential(j - 1));
    inv.free = n - r_out - r_in;
    if (c.ring().kind() == microlocal::exactalg::Ring::Kind::integers)
        for (auto& d : elementary_divisors(to_grid(c.differential(j - 1))))
            if (d != 1)
                inv.torsion.push_back(d);
    return inv;
}

inline Invariants invariants_of(const microlocal::exactalg::FgModule& m)
{
    Invariants inv;
    inv.free = m.free_rank();
    for (auto& t : m.torsion())
        inv.torsion.push_back(numerator(t));
    return inv;
}

/// Counts bijections and checks a set map given as an index table.
inline bool is_bijection(const std::vector<std::size_t>& f, std::size_t target_size)
{
    if (f.size() != target_size)
        return false;
    std::set<std::size_t> seen(f.begin(), f.end());
    return seen.size() == f.size() && (f.empty() || *seen.rbegin() < target_size);
}

inline std::vector<std::size_t> compose(const std::vector<std::size_t>& g, const std::vector<std::size_t>& f)
{
    std::vector<std::size_t> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = g[f[i]];
    return out;
}

} // namespace oracle
