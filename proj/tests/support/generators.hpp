#pragma once

// Hand-rolled random generators for property tests. Complexes and maps are
// built from elementary pieces (free generators and two-term pieces
// R --u--> R) and then conjugated by random invertible matrices, so every
// shape of cohomology, including ℤ torsion, shows up.

#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "microlocal/exactalg.hpp"

namespace gen {

using microlocal::Rational;
using microlocal::exactalg::ChainComplex;
using microlocal::exactalg::ChainMap;
using microlocal::exactalg::Matrix;
using microlocal::exactalg::Ring;
using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Rational scalar(Rng& rng, const Ring& ring, int lo = -3, int hi = 3)
{
    return ring.reduce(Rational(uniform(rng, lo, hi)));
}

inline Rational nonzero_scalar(Rng& rng, const Ring& ring)
{
    for (;;) {
        Rational x = scalar(rng, ring);
        if (x != 0)
            return x;
    }
}

inline Rational unit(Rng& rng, const Ring& ring)
{
    if (ring.kind() == Ring::Kind::integers)
        return uniform(rng, 0, 1) ? Rational(1) : Rational(-1);
    return nonzero_scalar(rng, ring);
}

inline Matrix random_matrix(Rng& rng, const Ring& ring, std::size_t r, std::size_t c, int lo = -3, int hi = 3)
{
    Matrix m(ring, r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            m.set(i, j, scalar(rng, ring, lo, hi));
    return m;
}

/// Random invertible matrix with its inverse (products of elementary moves).
struct Invertible
{
    Matrix m;
    Matrix inv;
};

inline Invertible random_invertible(Rng& rng, const Ring& ring, std::size_t n, int moves = -1)
{
    Invertible out{Matrix::identity(ring, n), Matrix::identity(ring, n)};
    if (n == 0)
        return out;
    if (moves < 0)
        moves = int(2 * n);
    for (int k = 0; k < moves; ++k) {
        std::size_t a = std::size_t(uniform(rng, 0, int(n) - 1));
        std::size_t b = std::size_t(uniform(rng, 0, int(n) - 1));
        if (a != b) {
            Rational c = scalar(rng, ring, -2, 2);
            out.m.add_row_multiple(a, b, c);
            out.inv.add_col_multiple(b, a, ring.neg(c));
        } else {
            Rational u = unit(rng, ring);
            out.m.scale_row(a, u);
            out.inv.scale_col(a, ring.inverse(u));
        }
    }
    return out;
}

/// A complex in elementary form: per degree, the list of basis vectors and
/// their roles. Kept alongside the conjugating transforms so maps can be
/// built in the elementary basis.
struct Piece
{
    enum Kind { free, bottom, top } kind;
    int partner = -1; // index in degree±1 for two-term pieces
    Rational weight;  // d(bottom) = weight · top
};

struct Elementary
{
    Ring ring = Ring::rationals();
    std::map<int, std::vector<Piece>> basis;
    std::map<int, Invertible> change; // elementary coords → stored coords

    std::size_t dim(int k) const
    {
        auto it = basis.find(k);
        return it == basis.end() ? 0 : it->second.size();
    }

    Matrix elementary_differential(int k) const
    {
        Matrix d(ring, dim(k + 1), dim(k));
        auto it = basis.find(k);
        if (it == basis.end())
            return d;
        for (std::size_t i = 0; i < it->second.size(); ++i)
            if (it->second[i].kind == Piece::bottom)
                d.set(std::size_t(it->second[i].partner), i, it->second[i].weight);
        return d;
    }

    ChainComplex complex() const
    {
        std::map<int, std::size_t> dims;
        std::map<int, Matrix> ds;
        for (auto& [k, b] : basis)
            dims[k] = b.size();
        for (auto& [k, b] : basis)
            if (dim(k + 1) && dim(k))
                ds.emplace(k, change.at(k + 1).m * elementary_differential(k) * change.at(k).inv);
        return ChainComplex::from_map(ring, dims, ds);
    }
};

struct ComplexOptions
{
    int lo = -3;
    int hi = 3;
    int max_rank = 6;
    bool allow_torsion = true;
    bool acyclic = false; // no free pieces
};

inline Elementary random_elementary(Rng& rng, const Ring& ring, ComplexOptions opt = {})
{
    Elementary e;
    e.ring = ring;
    std::map<int, int> used;
    for (int k = opt.lo; k <= opt.hi; ++k) {
        int nfree = opt.acyclic ? 0 : uniform(rng, 0, 2);
        for (int i = 0; i < nfree && used[k] < opt.max_rank; ++i) {
            e.basis[k].push_back({Piece::free, -1, Rational(0)});
            ++used[k];
        }
        if (k == opt.hi)
            continue;
        int npairs = uniform(rng, 0, 2);
        for (int i = 0; i < npairs && used[k] < opt.max_rank && used[k + 1] < opt.max_rank; ++i) {
            Rational w;
            if (ring.kind() == Ring::Kind::integers && opt.allow_torsion && !opt.acyclic && uniform(rng, 0, 2) == 0)
                w = Rational(uniform(rng, 2, 4) * (uniform(rng, 0, 1) ? 1 : -1));
            else
                w = unit(rng, ring);
            int bi = int(e.basis[k].size());
            int ti = int(e.basis[k + 1].size());
            e.basis[k].push_back({Piece::bottom, ti, w});
            e.basis[k + 1].push_back({Piece::top, bi, Rational(0)});
            ++used[k];
            ++used[k + 1];
        }
    }
    for (auto it = e.basis.begin(); it != e.basis.end();)
        it = it->second.empty() ? e.basis.erase(it) : std::next(it);
    for (auto& [k, b] : e.basis)
        e.change.emplace(k, random_invertible(rng, ring, b.size()));
    return e;
}

inline ChainComplex random_complex(Rng& rng, const Ring& ring, ComplexOptions opt = {})
{
    return random_elementary(rng, ring, opt).complex();
}

/// Random chain map a → b built in the elementary bases (see file comment).
inline ChainMap random_map(Rng& rng, const Elementary& a, const Elementary& b)
{
    const Ring& ring = a.ring;
    std::map<int, Matrix> elem;
    auto entry = [&](int k) -> Matrix& {
        auto it = elem.find(k);
        if (it == elem.end())
            it = elem.emplace(k, Matrix(ring, b.dim(k), a.dim(k))).first;
        return it->second;
    };
    auto cycle_coeffs = [&](int k, Matrix& m, std::size_t col) {
        auto it = b.basis.find(k);
        if (it == b.basis.end())
            return;
        for (std::size_t i = 0; i < it->second.size(); ++i)
            if (it->second[i].kind != Piece::bottom && uniform(rng, 0, 1))
                m.set(i, col, scalar(rng, ring));
    };
    for (auto& [k, pieces] : a.basis) {
        if (b.dim(k) == 0)
            continue;
        for (std::size_t j = 0; j < pieces.size(); ++j) {
            const Piece& p = pieces[j];
            if (p.kind == Piece::free) {
                cycle_coeffs(k, entry(k), j);
            } else if (p.kind == Piece::bottom) {
                Matrix& fk = entry(k);
                cycle_coeffs(k, fk, j);
                auto bit = b.basis.find(k);
                bool top_exists = b.dim(k + 1) > 0;
                for (std::size_t i = 0; i < bit->second.size(); ++i) {
                    const Piece& q = bit->second[i];
                    if (q.kind != Piece::bottom || !top_exists || uniform(rng, 0, 1) == 0)
                        continue;
                    Rational c = scalar(rng, ring, -2, 2);
                    if (ring.kind() == Ring::Kind::integers)
                        c *= p.weight;
                    fk.set(i, j, c);
                    // f(top) picks up c·w_b / w_a on b's top partner
                    Matrix& fk1 = entry(k + 1);
                    Rational v = ring.mul(c, q.weight);
                    v = ring.kind() == Ring::Kind::integers ? Rational(v / p.weight) : ring.mul(v, ring.inverse(p.weight));
                    fk1.set(std::size_t(q.partner), std::size_t(p.partner),
                            ring.add(fk1(std::size_t(q.partner), std::size_t(p.partner)), v));
                }
            }
        }
    }
    ChainComplex src = a.complex(), tgt = b.complex();
    std::map<int, Matrix> comps;
    for (auto& [k, m] : elem)
        if (a.dim(k) && b.dim(k))
            comps.emplace(k, b.change.at(k).m * m * a.change.at(k).inv);
    return ChainMap(src, tgt, std::move(comps));
}

} // namespace gen
