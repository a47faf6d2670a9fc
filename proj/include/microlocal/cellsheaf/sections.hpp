#pragma once

#include <map>
#include <memory>

#include "microlocal/cellsheaf/sheaf.hpp"

namespace microlocal::cellsheaf {

using exactalg::CohomologyTable;
using exactalg::FiberSequence;

/// Derived sections over an open cell set U, computed as the homotopy limit
/// of F over the face poset of U: cochains on the order complex of U,
///   C = ⊕ over chains σ0 < … < σp in U of F(σ_p)  (chain length adds to degree),
///   δx(σ0..σ_{p+1}) = Σ_{i≤p} (-1)^i x(σ0..σ̂i..σ_{p+1}) + (-1)^{p+1} F(σ_p<σ_{p+1}) x(σ0..σp),
/// with total differential δ + (-1)^p d_F. Section complexes and the maps
/// below are built unchecked; the test suite verifies them structurally.
struct SectionComplex
{
    struct Block
    {
        std::size_t chain;
        int stalk_degree;
        std::size_t offset;
        std::size_t size;
    };

    OpenCellSet domain;
    ChainComplex complex;
    std::vector<std::vector<std::size_t>> chains;
    std::map<std::vector<std::size_t>, std::size_t> chain_index;
    std::map<int, std::vector<Block>> blocks;                        // by total degree
    std::map<std::pair<std::size_t, int>, std::size_t> block_offset; // (chain, stalk degree) → offset

    std::size_t offset_of(std::size_t chain, int stalk_degree) const { return block_offset.at({chain, stalk_degree}); }
};

namespace detail {

inline std::vector<std::vector<std::size_t>> order_chains(const SimplicialComplex& k, const OpenCellSet& u)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur;
    auto extend = [&](auto&& self) -> void {
        out.push_back(cur);
        for (auto t : k.cofaces(cur.back()))
            if (u.contains(t)) {
                cur.push_back(t);
                self(self);
                cur.pop_back();
            }
    };
    for (auto s : u.cells()) {
        cur = {s};
        extend(extend);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    return out;
}

} // namespace detail

inline SectionComplex sections(const CellSheaf& f, const OpenCellSet& u)
{
    const SimplicialComplex& k = f.space();
    const Ring& ring = f.ring();
    if (!k.is_open(u.cells()))
        throw InvalidInput("sections: domain is not coface-closed");
    SectionComplex out;
    out.domain = u;
    out.chains = detail::order_chains(k, u);
    std::map<int, std::size_t> dims;
    for (std::size_t c = 0; c < out.chains.size(); ++c) {
        const auto& ch = out.chains[c];
        out.chain_index.emplace(ch, c);
        int p = int(ch.size()) - 1;
        const ChainComplex& st = f.stalk(ch.back());
        for (int d : st.support()) {
            int n = p + d;
            SectionComplex::Block b{c, d, dims[n], st.dim(d)};
            out.blocks[n].push_back(b);
            out.block_offset.emplace(std::pair{c, d}, b.offset);
            dims[n] += b.size;
        }
    }
    if (dims.empty()) {
        out.complex = ChainComplex(ring);
        return out;
    }
    const int lo = dims.begin()->first, hi = dims.rbegin()->first;
    auto dim = [&](int n) {
        auto it = dims.find(n);
        return it == dims.end() ? std::size_t(0) : it->second;
    };
    std::map<int, Matrix> ds;
    for (int n = lo; n < hi; ++n)
        ds.emplace(n, Matrix(ring, dim(n + 1), dim(n)));

    auto paste_scaled = [&](int n, std::size_t row, std::size_t col, const Matrix& m, int sign) {
        Matrix& d = ds.at(n);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (m(i, j) != 0)
                    d.set(row + i, col + j, sign > 0 ? m(i, j) : Rational(-m(i, j)));
    };

    for (std::size_t c = 0; c < out.chains.size(); ++c) {
        const auto& ch = out.chains[c];
        const int p = int(ch.size()) - 1;
        const ChainComplex& st = f.stalk(ch.back());
        // stalk differential
        for (int d : st.support())
            if (st.dim(d + 1))
                paste_scaled(p + d, out.offset_of(c, d + 1), out.offset_of(c, d), st.differential(d),
                             p % 2 == 0 ? 1 : -1);
        if (p == 0)
            continue;
        // coface part: c is the longer chain, faces drop one entry
        for (int i = 0; i <= p; ++i) {
            std::vector<std::size_t> face = ch;
            face.erase(face.begin() + i);
            std::size_t fc = out.chain_index.at(face);
            if (i < p) {
                int sign = i % 2 == 0 ? 1 : -1;
                for (int d : st.support())
                    paste_scaled(p - 1 + d, out.offset_of(c, d), out.offset_of(fc, d),
                                 Matrix::identity(ring, st.dim(d)), sign);
            } else {
                int sign = p % 2 == 0 ? 1 : -1;
                const ChainMap& g = f.map(ch[p - 1], ch[p]);
                const ChainComplex& src = f.stalk(ch[p - 1]);
                for (int d : st.support())
                    if (src.dim(d))
                        paste_scaled(p - 1 + d, out.offset_of(c, d), out.offset_of(fc, d), g.component(d), sign);
            }
        }
    }
    out.complex = ChainComplex::from_map(exactalg::unchecked, ring, dims, ds);
    return out;
}

/// Restriction Γ(U) → Γ(V) for V ⊆ U: projection onto chains inside V.
inline ChainMap restriction(const SectionComplex& from, const SectionComplex& to)
{
    for (auto c : to.domain.cells())
        if (!from.domain.contains(c))
            throw PreconditionError("restriction target is not contained in the source domain");
    const Ring& ring = from.complex.ring();
    std::map<int, Matrix> comps;
    for (auto& [n, bs] : to.blocks) {
        Matrix m(ring, to.complex.dim(n), from.complex.dim(n));
        for (auto& b : bs) {
            std::size_t src = from.chain_index.at(to.chains[b.chain]);
            std::size_t col = from.offset_of(src, b.stalk_degree);
            for (std::size_t i = 0; i < b.size; ++i)
                m.set(b.offset + i, col + i, 1);
        }
        comps.emplace(n, std::move(m));
    }
    return ChainMap(exactalg::unchecked, from.complex, to.complex, std::move(comps));
}

/// F_σ → Γ(W) for W inside the star of σ: x ↦ (F(σ<τ)x) on one-element chains.
inline ChainMap stalk_comparison(const CellSheaf& f, std::size_t cell, const SectionComplex& target)
{
    const SimplicialComplex& k = f.space();
    for (auto c : target.domain.cells())
        if (!k.is_face(cell, c))
            throw PreconditionError("comparison target leaves the star of " + k.label(cell));
    const ChainComplex& st = f.stalk(cell);
    std::map<int, Matrix> comps;
    for (int d : st.support()) {
        if (!target.complex.dim(d))
            continue;
        Matrix m(f.ring(), target.complex.dim(d), st.dim(d));
        for (auto& b : target.blocks.at(d)) {
            const auto& ch = target.chains[b.chain];
            if (ch.size() != 1)
                continue;
            m.paste(f.map(cell, ch[0]).component(d), b.offset, 0);
        }
        comps.emplace(d, std::move(m));
    }
    return ChainMap(exactalg::unchecked, st, target.complex, std::move(comps));
}

/// Memoized section complexes and their cohomology, keyed by domain.
class SectionCache
{
public:
    explicit SectionCache(const CellSheaf& f) : f_(f) {}

    const SectionComplex& sections(const CellSet& u)
    {
        auto it = sections_.find(u);
        if (it == sections_.end())
            it = sections_.emplace(u, cellsheaf::sections(f_, OpenCellSet(f_.space(), u))).first;
        return it->second;
    }

    const CohomologyTable& cohomology(const CellSet& u)
    {
        auto it = tables_.find(u);
        if (it == tables_.end())
            it = tables_.emplace(u, CohomologyTable(sections(u).complex)).first;
        return it->second;
    }

    const CellSheaf& sheaf() const { return f_; }

private:
    const CellSheaf& f_;
    std::map<CellSet, SectionComplex> sections_;
    std::map<CellSet, CohomologyTable> tables_;
};

/// Γ_Z(U; F) = fib(Γ(U) → Γ(U∖Z)) for Z ⊆ U closed in U.
inline FiberSequence sections_supported(const CellSheaf& f, const CellSet& closed, const OpenCellSet& u)
{
    const SimplicialComplex& k = f.space();
    for (auto c : closed)
        if (!u.contains(c))
            throw InvalidInput("support set leaves the domain at " + (c < k.size() ? k.label(c) : std::to_string(c)));
    CellSet rest = set_difference(u.cells(), closed);
    if (!k.is_open(rest))
        throw InvalidInput("support set is not closed in the domain");
    return exactalg::fiber_sequence(restriction(sections(f, u), sections(f, OpenCellSet(k, rest))));
}

/// (Γ_{X∖W} F)_σ = fib(F_σ → Γ(star σ ∩ W)).
inline ChainComplex stalk_of_supported_sections(const CellSheaf& f, std::size_t cell, const OpenCellSet& w)
{
    const SimplicialComplex& k = f.space();
    OpenCellSet near(k, set_intersection(k.star(cell), w.cells()));
    return exactalg::fiber(stalk_comparison(f, cell, sections(f, near)));
}

} // namespace microlocal::cellsheaf
