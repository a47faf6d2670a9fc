#pragma once

#include <map>
#include <memory>
#include <utility>

#include "microlocal/cellsheaf/complex.hpp"

namespace microlocal::cellsheaf {

/// Constructible sheaf on a simplicial complex: a stalk complex per cell and a
/// generization map F_σ → F_τ for every codimension-one pair σ < τ, such that
/// every square of the face poset commutes. Unlisted generization maps are zero.
class CellSheaf
{
public:
    using Key = std::pair<std::size_t, std::size_t>;

    CellSheaf(std::shared_ptr<const SimplicialComplex> space, Ring ring, std::vector<ChainComplex> stalks,
              const std::map<Key, ChainMap>& generization)
        : space_(std::move(space)), ring_(ring), stalks_(std::move(stalks))
    {
        const SimplicialComplex& k = *space_;
        if (stalks_.size() != k.size())
            throw InvalidInput("sheaf needs one stalk per cell: got " + std::to_string(stalks_.size()) + " for "
                               + std::to_string(k.size()) + " cells");
        for (auto& s : stalks_)
            if (!(s.ring() == ring_))
                throw InvalidInput("stalk ring differs from the sheaf ring");
        for (auto& [key, f] : generization) {
            auto [a, b] = key;
            if (a >= k.size() || b >= k.size() || !k.is_face(a, b) || k.dim(b) != k.dim(a) + 1)
                throw InvalidInput("generization " + pair_label(a, b) + " is not a codimension-one face pair");
            if (!(f.source() == stalks_[a]) || !(f.target() == stalks_[b]))
                throw InvalidInput("generization " + pair_label(a, b) + " does not run between the stalks");
        }
        for (std::size_t t = 0; t < k.size(); ++t) {
            maps_.emplace(Key{t, t}, ChainMap::identity(stalks_[t]));
            for (auto [f, sign] : k.facets(t)) {
                auto it = generization.find({f, t});
                maps_.emplace(Key{f, t}, it == generization.end() ? ChainMap::zero(stalks_[f], stalks_[t]) : it->second);
            }
        }
        check_squares();
        for (std::size_t t = 0; t < k.size(); ++t)
            for (int codim = 2; codim <= k.dim(t); ++codim)
                for (std::size_t s = 0; s < t; ++s)
                    if (k.dim(s) + codim == k.dim(t) && k.is_face(s, t)) {
                        std::size_t mid = first_step(s, t);
                        maps_.emplace(Key{s, t}, exactalg::compose(maps_.at({mid, t}), maps_.at({s, mid})));
                    }
    }

    /// Stalk C on every cell, identity generizations.
    static CellSheaf constant(std::shared_ptr<const SimplicialComplex> space, const ChainComplex& c)
    {
        return indicator(space, space->all_cells(), c);
    }

    /// C on the cells of `support`, zero elsewhere, identity between support
    /// cells. `support` must be locally closed (convex in the face order).
    static CellSheaf indicator(std::shared_ptr<const SimplicialComplex> space, CellSet support, const ChainComplex& c)
    {
        const SimplicialComplex& k = *space;
        std::sort(support.begin(), support.end());
        support.erase(std::unique(support.begin(), support.end()), support.end());
        for (auto s : support)
            if (s >= k.size())
                throw InvalidInput("cell index out of range");
        for (std::size_t a = 0; a < k.size(); ++a)
            for (std::size_t b : k.cofaces(a))
                if (set_contains(support, a) && set_contains(support, b))
                    for (std::size_t m : k.cofaces(a))
                        if (k.is_face(m, b) && m != b && !set_contains(support, m))
                            throw InvalidInput("support is not locally closed: " + k.label(m) + " lies between "
                                               + k.label(a) + " and " + k.label(b));
        ChainComplex zero(c.ring());
        std::vector<ChainComplex> stalks(k.size(), zero);
        for (auto s : support)
            stalks[s] = c;
        std::map<Key, ChainMap> gen;
        for (std::size_t t = 0; t < k.size(); ++t)
            for (auto [f, sign] : k.facets(t))
                if (set_contains(support, f) && set_contains(support, t))
                    gen.emplace(Key{f, t}, ChainMap::identity(c));
        return CellSheaf(std::move(space), c.ring(), std::move(stalks), gen);
    }

    static CellSheaf skyscraper(std::shared_ptr<const SimplicialComplex> space, std::size_t cell, const ChainComplex& c)
    {
        return indicator(std::move(space), {cell}, c);
    }

    friend CellSheaf direct_sum(const CellSheaf& a, const CellSheaf& b)
    {
        if (a.space_ != b.space_ && !(a.space_->cells() == b.space_->cells()))
            throw InvalidInput("direct sum of sheaves on different complexes");
        std::vector<ChainComplex> stalks;
        for (std::size_t i = 0; i < a.stalks_.size(); ++i)
            stalks.push_back(direct_sum(a.stalks_[i], b.stalks_[i]));
        std::map<Key, ChainMap> gen;
        const SimplicialComplex& k = *a.space_;
        for (std::size_t t = 0; t < k.size(); ++t)
            for (auto [f, sign] : k.facets(t)) {
                const ChainMap& fa = a.maps_.at({f, t});
                const ChainMap& fb = b.maps_.at({f, t});
                std::map<int, Matrix> comps;
                auto [lo, hi] = exactalg::joint_range(stalks[f], stalks[t]);
                for (int d = lo; d <= hi; ++d)
                    comps.emplace(d, Matrix::direct_sum(fa.component(d), fb.component(d)));
                gen.emplace(Key{f, t}, ChainMap(stalks[f], stalks[t], comps));
            }
        return CellSheaf(a.space_, a.ring_, std::move(stalks), gen);
    }

    const SimplicialComplex& space() const { return *space_; }
    const std::shared_ptr<const SimplicialComplex>& space_ptr() const { return space_; }
    const Ring& ring() const { return ring_; }
    const ChainComplex& stalk(std::size_t i) const { return stalks_.at(i); }
    const std::vector<ChainComplex>& stalks() const { return stalks_; }

    /// F_σ → F_τ for σ ≤ τ (identity when equal).
    const ChainMap& map(std::size_t s, std::size_t t) const
    {
        auto it = maps_.find({s, t});
        if (it == maps_.end())
            throw PreconditionError(pair_label(s, t) + " is not a face pair");
        return it->second;
    }

    /// Closure of the cells whose stalk is not acyclic.
    CellSet support() const
    {
        CellSet hot;
        for (std::size_t i = 0; i < stalks_.size(); ++i)
            if (!exactalg::is_acyclic(stalks_[i]))
                hot.push_back(i);
        return space_->closure(hot);
    }

private:
    std::string pair_label(std::size_t a, std::size_t b) const
    {
        auto lab = [&](std::size_t i) { return i < space_->size() ? space_->label(i) : "#" + std::to_string(i); };
        return lab(a) + " < " + lab(b);
    }

    std::size_t first_step(std::size_t s, std::size_t t) const
    {
        const Cell& cs = space_->cell(s);
        for (auto v : space_->cell(t))
            if (!std::binary_search(cs.begin(), cs.end(), v)) {
                Cell m = cs;
                m.insert(std::lower_bound(m.begin(), m.end(), v), v);
                return *space_->find(m);
            }
        throw PreconditionError("no intermediate cell");
    }

    void check_squares() const
    {
        const SimplicialComplex& k = *space_;
        for (std::size_t t = 0; t < k.size(); ++t) {
            if (k.dim(t) < 2)
                continue;
            for (auto [r1, s1] : k.facets(t))
                for (auto [r2, s2] : k.facets(t)) {
                    if (r2 <= r1)
                        continue;
                    Cell low;
                    std::set_intersection(k.cell(r1).begin(), k.cell(r1).end(), k.cell(r2).begin(), k.cell(r2).end(),
                                          std::back_inserter(low));
                    std::size_t s = *k.find(low);
                    auto via1 = exactalg::compose(maps_.at({r1, t}), maps_.at({s, r1}));
                    auto via2 = exactalg::compose(maps_.at({r2, t}), maps_.at({s, r2}));
                    if (!(via1 == via2))
                        throw InvalidInput("generization square does not commute: " + k.label(s) + " < " + k.label(r1)
                                           + ", " + k.label(r2) + " < " + k.label(t));
                }
        }
    }

    std::shared_ptr<const SimplicialComplex> space_;
    Ring ring_;
    std::vector<ChainComplex> stalks_;
    std::map<Key, ChainMap> maps_;
};

} // namespace microlocal::cellsheaf
