#pragma once

#include <set>
#include <string>
#include <vector>

#include "microlocal/exactalg.hpp"

namespace microlocal::towers {

using microlocal::to_string;

using exactalg::ChainComplex;
using exactalg::ChainMap;
using exactalg::FgModule;
using exactalg::Matrix;
using exactalg::ModuleMap;
using exactalg::Ring;

/// Finite set with element labels; elements are referred to by index.
struct FiniteSet
{
    std::vector<std::string> labels;

    std::size_t size() const { return labels.size(); }

    static FiniteSet of_size(std::size_t n)
    {
        FiniteSet s;
        for (std::size_t i = 0; i < n; ++i)
            s.labels.push_back("e" + std::to_string(i));
        return s;
    }

    bool operator==(const FiniteSet&) const = default;
};

/// Set map as an index table: image[i] is the image of element i.
using SetMap = std::vector<std::size_t>;

inline bool map_is_injective(const SetMap& f)
{
    std::set<std::size_t> seen(f.begin(), f.end());
    return seen.size() == f.size();
}

inline bool map_is_surjective(const SetMap& f, std::size_t target)
{
    std::set<std::size_t> seen(f.begin(), f.end());
    return seen.size() == target;
}

inline SetMap compose_maps(const SetMap& g, const SetMap& f)
{
    SetMap out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        out[i] = g[f[i]];
    return out;
}

inline SetMap identity_map(std::size_t n)
{
    SetMap m(n);
    for (std::size_t i = 0; i < n; ++i)
        m[i] = i;
    return m;
}

struct PointedSet
{
    FiniteSet set;
    std::size_t base = 0;
    bool operator==(const PointedSet&) const = default;
};

/// Finite group given by its multiplication table.
class FiniteGroup
{
public:
    FiniteGroup() : FiniteGroup({"1"}, {{0}}) {}

    FiniteGroup(std::vector<std::string> labels, std::vector<std::vector<std::size_t>> table)
        : labels_(std::move(labels)), table_(std::move(table))
    {
        const std::size_t n = labels_.size();
        if (n == 0 || table_.size() != n)
            throw InvalidInput("group table must be a nonempty square table");
        for (auto& row : table_) {
            if (row.size() != n)
                throw InvalidInput("group table must be square");
            for (auto x : row)
                if (x >= n)
                    throw InvalidInput("group table entry out of range");
        }
        identity_ = n;
        for (std::size_t e = 0; e < n && identity_ == n; ++e) {
            bool ok = true;
            for (std::size_t a = 0; a < n && ok; ++a)
                ok = table_[e][a] == a && table_[a][e] == a;
            if (ok)
                identity_ = e;
        }
        if (identity_ == n)
            throw InvalidInput("group table has no identity");
        for (std::size_t a = 0; a < n; ++a) {
            bool has_inverse = false;
            for (std::size_t b = 0; b < n && !has_inverse; ++b)
                has_inverse = table_[a][b] == identity_;
            if (!has_inverse)
                throw InvalidInput("group element '" + labels_[a] + "' has no inverse");
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t c = 0; c < n; ++c)
                    if (table_[table_[a][b]][c] != table_[a][table_[b][c]])
                        throw InvalidInput("group table is not associative");
        }
    }

    std::size_t size() const { return labels_.size(); }
    std::size_t identity() const { return identity_; }
    std::size_t mul(std::size_t a, std::size_t b) const { return table_[a][b]; }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<std::vector<std::size_t>>& table() const { return table_; }

    bool operator==(const FiniteGroup& o) const { return labels_ == o.labels_ && table_ == o.table_; }

private:
    std::vector<std::string> labels_;
    std::vector<std::vector<std::size_t>> table_;
    std::size_t identity_ = 0;
};

// Traits bundle the category operations a tower needs: identity, composition,
// validation of a structure map, and the bijective/surjective tests used by
// the criteria.

struct SetTraits
{
    using Value = FiniteSet;
    using Map = SetMap;
    static constexpr const char* name = "sets";

    static Map identity(const Value& v) { return identity_map(v.size()); }
    static Map compose(const Map& g, const Map& f) { return compose_maps(g, f); }
    static void validate(const Map& f, const Value& src, const Value& tgt)
    {
        if (f.size() != src.size())
            throw InvalidInput("set map has " + std::to_string(f.size()) + " entries for a source of size "
                               + std::to_string(src.size()));
        for (auto x : f)
            if (x >= tgt.size())
                throw InvalidInput("set map image out of range");
    }
    static bool is_bijective(const Map& f, const Value&, const Value& tgt)
    {
        return f.size() == tgt.size() && map_is_injective(f);
    }
    static bool is_surjective(const Map& f, const Value&, const Value& tgt) { return map_is_surjective(f, tgt.size()); }
    static bool equal(const Map& a, const Map& b) { return a == b; }
};

struct PointedSetTraits
{
    using Value = PointedSet;
    using Map = SetMap;
    static constexpr const char* name = "pointed-sets";

    static Map identity(const Value& v) { return identity_map(v.set.size()); }
    static Map compose(const Map& g, const Map& f) { return compose_maps(g, f); }
    static void validate(const Map& f, const Value& src, const Value& tgt)
    {
        if (src.base >= src.set.size() || tgt.base >= tgt.set.size())
            throw InvalidInput("base point out of range");
        SetTraits::validate(f, src.set, tgt.set);
        if (f[src.base] != tgt.base)
            throw InvalidInput("pointed map does not preserve the base point");
    }
    static bool is_bijective(const Map& f, const Value& s, const Value& t) { return SetTraits::is_bijective(f, s.set, t.set); }
    static bool is_surjective(const Map& f, const Value& s, const Value& t) { return SetTraits::is_surjective(f, s.set, t.set); }
    static bool equal(const Map& a, const Map& b) { return a == b; }
};

struct GroupTraits
{
    using Value = FiniteGroup;
    using Map = SetMap;
    static constexpr const char* name = "groups";

    static Map identity(const Value& v) { return identity_map(v.size()); }
    static Map compose(const Map& g, const Map& f) { return compose_maps(g, f); }
    static void validate(const Map& f, const Value& src, const Value& tgt)
    {
        if (f.size() != src.size())
            throw InvalidInput("group map has the wrong number of entries");
        for (auto x : f)
            if (x >= tgt.size())
                throw InvalidInput("group map image out of range");
        for (std::size_t a = 0; a < src.size(); ++a)
            for (std::size_t b = 0; b < src.size(); ++b)
                if (f[src.mul(a, b)] != tgt.mul(f[a], f[b]))
                    throw InvalidInput("group map is not a homomorphism");
    }
    static bool is_bijective(const Map& f, const Value&, const Value& t) { return f.size() == t.size() && map_is_injective(f); }
    static bool is_surjective(const Map& f, const Value&, const Value& t) { return map_is_surjective(f, t.size()); }
    static bool equal(const Map& a, const Map& b) { return a == b; }
};

struct ModuleTraits
{
    using Value = FgModule;
    using Map = ModuleMap;
    static constexpr const char* name = "modules";

    static Map identity(const Value& v) { return {v, v, Matrix::identity(v.ring(), v.generators())}; }
    static Map compose(const Map& g, const Map& f) { return {f.source, g.target, g.matrix * f.matrix}; }
    static void validate(const Map& f, const Value& src, const Value& tgt)
    {
        if (!(f.source == src) || !(f.target == tgt))
            throw InvalidInput("module map endpoints do not match the tower");
        f.validate();
    }
    static bool is_bijective(const Map& f, const Value&, const Value&) { return exactalg::is_isomorphism(f); }
    static bool is_surjective(const Map& f, const Value&, const Value&) { return exactalg::is_surjective(f); }
    static bool equal(const Map& a, const Map& b)
    {
        if (!(a.source == b.source) || !(a.target == b.target))
            return false;
        // equal as homomorphisms: difference lands in the target relations
        return exactalg::column_span_contains(a.target.relations(), a.matrix - b.matrix);
    }
};

struct ComplexTraits
{
    using Value = ChainComplex;
    using Map = ChainMap;
    static constexpr const char* name = "complexes";

    static Map identity(const Value& v) { return ChainMap::identity(v); }
    static Map compose(const Map& g, const Map& f) { return exactalg::compose(g, f); }
    static void validate(const Map& f, const Value& src, const Value& tgt)
    {
        if (!(f.source() == src) || !(f.target() == tgt))
            throw InvalidInput("chain map endpoints do not match the tower");
    }
    /// Degreewise isomorphism.
    static bool is_bijective(const Map& f, const Value& s, const Value& t)
    {
        auto [lo, hi] = exactalg::joint_range(s, t);
        for (int k = lo; k <= hi; ++k)
            if (s.dim(k) != t.dim(k) || (s.dim(k) && !exactalg::is_invertible_matrix(f.component(k))))
                return false;
        return true;
    }
    /// Degreewise surjective.
    static bool is_surjective(const Map& f, const Value& s, const Value& t)
    {
        auto [lo, hi] = exactalg::joint_range(s, t);
        for (int k = lo; k <= hi; ++k)
            if (t.dim(k) && !exactalg::is_surjective_matrix(f.component(k)))
                return false;
        return true;
    }
    static bool equal(const Map& a, const Map& b) { return a == b; }
};

} // namespace microlocal::towers
