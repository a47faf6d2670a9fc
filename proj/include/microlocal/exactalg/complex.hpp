#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "microlocal/exactalg/module.hpp"

namespace microlocal::exactalg {

/// Cochain complex with finite degree support: C^lo → C^{lo+1} → … → C^hi.
/// Tag for constructors that skip the structural verification.
struct Unchecked
{
};
inline constexpr Unchecked unchecked{};

/// Degrees outside [lo, hi] are zero. d∘d = 0 is checked on construction, so
/// a ChainComplex value is always well-formed. Copies share storage.
class ChainComplex
{
public:
    explicit ChainComplex(Ring ring = Ring::rationals()) : data_(std::make_shared<Data>(Data{ring, 0, {}, {}})) {}

    /// dims[i] = rank of C^{lowest+i}; differentials[i] : C^{lowest+i} → C^{lowest+i+1}
    /// (so differentials.size() == dims.size() - 1, or 0 when dims is empty).
    ChainComplex(Ring ring, int lowest, std::vector<std::size_t> dims, std::vector<Matrix> differentials)
        : ChainComplex(ring, lowest, std::move(dims), std::move(differentials), true)
    {
    }

    /// Skips the d∘d check, for complexes that are complexes by construction.
    ChainComplex(Unchecked, Ring ring, int lowest, std::vector<std::size_t> dims, std::vector<Matrix> differentials)
        : ChainComplex(ring, lowest, std::move(dims), std::move(differentials), false)
    {
    }

private:
    ChainComplex(Ring ring, int lowest, std::vector<std::size_t> dims, std::vector<Matrix> differentials, bool verify)
    {
        if (dims.empty() ? !differentials.empty() : differentials.size() + 1 != dims.size())
            throw InvalidInput("complex needs exactly one differential between consecutive degrees");
        for (std::size_t i = 0; i < differentials.size(); ++i) {
            const Matrix& d = differentials[i];
            if (!(d.ring() == ring))
                throw InvalidInput("differential ring mismatch");
            if (d.rows() != dims[i + 1] || d.cols() != dims[i])
                throw InvalidInput("differential in degree " + std::to_string(lowest + int(i)) + " has shape "
                                   + d.shape() + ", expected " + std::to_string(dims[i + 1]) + "x"
                                   + std::to_string(dims[i]));
        }
        for (std::size_t i = 0; verify && i + 1 < differentials.size(); ++i)
            if (!(differentials[i + 1] * differentials[i]).is_zero())
                throw InvalidInput("d∘d ≠ 0 at degree " + std::to_string(lowest + int(i)));
        data_ = std::make_shared<Data>(Data{ring, lowest, std::move(dims), std::move(differentials)});
    }

public:

    /// Degreewise ranks and differentials keyed by degree; missing differentials are zero.
    static ChainComplex from_map(Ring ring, const std::map<int, std::size_t>& dims,
                                 const std::map<int, Matrix>& differentials = {})
    {
        return from_map(ring, dims, differentials, true);
    }

    static ChainComplex from_map(Unchecked, Ring ring, const std::map<int, std::size_t>& dims,
                                 const std::map<int, Matrix>& differentials)
    {
        return from_map(ring, dims, differentials, false);
    }

private:
    static ChainComplex from_map(Ring ring, const std::map<int, std::size_t>& dims,
                                 const std::map<int, Matrix>& differentials, bool verify)
    {
        std::vector<int> keys;
        for (auto& [k, n] : dims)
            if (n > 0)
                keys.push_back(k);
        if (keys.empty()) {
            for (auto& [k, d] : differentials)
                if (d.rows() || d.cols())
                    throw InvalidInput("differential given on zero complex");
            return ChainComplex(ring);
        }
        int lo = keys.front(), hi = keys.back();
        std::vector<std::size_t> dv;
        for (int k = lo; k <= hi; ++k) {
            auto it = dims.find(k);
            dv.push_back(it == dims.end() ? 0 : it->second);
        }
        std::vector<Matrix> ds;
        for (int k = lo; k < hi; ++k) {
            auto it = differentials.find(k);
            ds.push_back(it == differentials.end() ? Matrix(ring, dv[k + 1 - lo], dv[k - lo]) : it->second);
        }
        for (auto& [k, d] : differentials)
            if ((k < lo || k >= hi) && !d.is_zero())
                throw InvalidInput("differential outside the support at degree " + std::to_string(k));
        return ChainComplex(ring, lo, std::move(dv), std::move(ds), verify);
    }

public:

    /// A single module R^n in degree k.
    static ChainComplex concentrated(Ring ring, int degree, std::size_t n)
    {
        return ChainComplex(ring, degree, {n}, {});
    }

    const Ring& ring() const { return data_->ring; }
    int lowest() const { return data_->lowest; }
    int highest() const { return data_->lowest + int(data_->dims.size()) - 1; }
    bool empty_range() const { return data_->dims.empty(); }

    std::size_t dim(int k) const
    {
        if (data_->dims.empty() || k < lowest() || k > highest())
            return 0;
        return data_->dims[std::size_t(k - lowest())];
    }

    /// d^k : C^k → C^{k+1} (a zero matrix of the right shape outside the stored range).
    Matrix differential(int k) const
    {
        if (!data_->dims.empty() && k >= lowest() && k < highest())
            return data_->differentials[std::size_t(k - lowest())];
        return Matrix(ring(), dim(k + 1), dim(k));
    }

    std::size_t total_rank() const
    {
        std::size_t n = 0;
        for (auto d : data_->dims)
            n += d;
        return n;
    }

    /// Degrees with nonzero modules.
    std::vector<int> support() const
    {
        std::vector<int> out;
        for (int k = lowest(); !empty_range() && k <= highest(); ++k)
            if (dim(k) > 0)
                out.push_back(k);
        return out;
    }

    /// X[n]: (X[n])^k = X^{k+n} with differential (-1)^n d.
    ChainComplex shifted(int n) const
    {
        if (empty_range())
            return *this;
        std::vector<Matrix> ds = data_->differentials;
        if (n % 2 != 0)
            for (auto& d : ds)
                d = d.scaled(Rational(-1));
        return ChainComplex(ring(), lowest() - n, data_->dims, std::move(ds));
    }

    friend ChainComplex direct_sum(const ChainComplex& a, const ChainComplex& b)
    {
        if (!(a.ring() == b.ring()))
            throw InvalidInput("direct sum ring mismatch");
        if (a.empty_range())
            return b;
        if (b.empty_range())
            return a;
        int lo = std::min(a.lowest(), b.lowest()), hi = std::max(a.highest(), b.highest());
        std::vector<std::size_t> dims;
        std::vector<Matrix> ds;
        for (int k = lo; k <= hi; ++k)
            dims.push_back(a.dim(k) + b.dim(k));
        for (int k = lo; k < hi; ++k)
            ds.push_back(Matrix::direct_sum(a.differential(k), b.differential(k)));
        return ChainComplex(a.ring(), lo, std::move(dims), std::move(ds));
    }

    friend bool operator==(const ChainComplex& a, const ChainComplex& b)
    {
        if (!(a.ring() == b.ring()))
            return false;
        int lo = std::min(a.empty_range() ? 0 : a.lowest(), b.empty_range() ? 0 : b.lowest());
        int hi = std::max(a.empty_range() ? 0 : a.highest(), b.empty_range() ? 0 : b.highest());
        for (int k = lo; k <= hi; ++k)
            if (a.dim(k) != b.dim(k) || !(a.differential(k) == b.differential(k)))
                return false;
        return true;
    }

private:
    struct Data
    {
        Ring ring;
        int lowest;
        std::vector<std::size_t> dims;
        std::vector<Matrix> differentials;
    };
    std::shared_ptr<const Data> data_;
};

/// Degree range covering both complexes (an empty range when both are zero).
inline std::pair<int, int> joint_range(const ChainComplex& a, const ChainComplex& b)
{
    if (a.empty_range() && b.empty_range())
        return {0, -1};
    if (a.empty_range())
        return {b.lowest(), b.highest()};
    if (b.empty_range())
        return {a.lowest(), a.highest()};
    return {std::min(a.lowest(), b.lowest()), std::max(a.highest(), b.highest())};
}

/// Degreewise maps f^k : source^k → target^k commuting with the differentials
/// (checked on construction). Missing components are zero.
class ChainMap
{
public:
    ChainMap(ChainComplex source, ChainComplex target, std::map<int, Matrix> components = {})
        : ChainMap(std::move(source), std::move(target), std::move(components), true)
    {
    }

    /// Skips the commutation check, for maps that are chain maps by construction.
    ChainMap(Unchecked, ChainComplex source, ChainComplex target, std::map<int, Matrix> components)
        : ChainMap(std::move(source), std::move(target), std::move(components), false)
    {
    }

private:
    ChainMap(ChainComplex source, ChainComplex target, std::map<int, Matrix> components, bool verify)
        : source_(std::move(source)), target_(std::move(target))
    {
        if (!(source_.ring() == target_.ring()))
            throw InvalidInput("chain map ring mismatch");
        auto [lo, hi] = joint_range(source_, target_);
        for (auto& [k, m] : components) {
            if (m.rows() != target_.dim(k) || m.cols() != source_.dim(k))
                throw InvalidInput("chain map component in degree " + std::to_string(k) + " has shape "
                                   + m.shape() + ", expected " + std::to_string(target_.dim(k)) + "x"
                                   + std::to_string(source_.dim(k)));
            if (!(m.ring() == source_.ring()))
                throw InvalidInput("chain map component ring mismatch");
        }
        for (int k = lo; k <= hi; ++k) {
            auto it = components.find(k);
            if (it != components.end() && (it->second.rows() || it->second.cols()))
                components_.emplace(k, std::move(it->second));
        }
        for (int k = lo - 1; verify && k <= hi; ++k) {
            Matrix lhs = target_.differential(k) * component(k);
            Matrix rhs = component(k + 1) * source_.differential(k);
            if (!(lhs == rhs))
                throw InvalidInput("chain map does not commute with differentials at degree " + std::to_string(k));
        }
    }

public:
    static ChainMap identity(const ChainComplex& c)
    {
        std::map<int, Matrix> comps;
        for (int k : c.support())
            comps.emplace(k, Matrix::identity(c.ring(), c.dim(k)));
        return ChainMap(c, c, std::move(comps));
    }

    static ChainMap zero(const ChainComplex& s, const ChainComplex& t) { return ChainMap(s, t, {}); }

    const ChainComplex& source() const { return source_; }
    const ChainComplex& target() const { return target_; }

    Matrix component(int k) const
    {
        auto it = components_.find(k);
        if (it != components_.end())
            return it->second;
        return Matrix(source_.ring(), target_.dim(k), source_.dim(k));
    }

    const std::map<int, Matrix>& components() const { return components_; }

    friend bool operator==(const ChainMap& a, const ChainMap& b)
    {
        if (!(a.source_ == b.source_) || !(a.target_ == b.target_))
            return false;
        auto [lo, hi] = joint_range(a.source_, a.target_);
        for (int k = lo; k <= hi; ++k)
            if (!(a.component(k) == b.component(k)))
                return false;
        return true;
    }

private:
    ChainComplex source_;
    ChainComplex target_;
    std::map<int, Matrix> components_;
};

/// g ∘ f
inline ChainMap compose(const ChainMap& g, const ChainMap& f)
{
    if (!(g.source() == f.target()))
        throw InvalidInput("compose: source of g differs from target of f");
    std::map<int, Matrix> comps;
    auto [lo, hi] = joint_range(f.source(), g.target());
    for (int k = lo; k <= hi; ++k)
        if (f.source().dim(k) && g.target().dim(k))
            comps.emplace(k, g.component(k) * f.component(k));
    return ChainMap(f.source(), g.target(), std::move(comps));
}

// ---------------------------------------------------------------------------
// Cohomology

/// H^j of a complex together with deterministic representative cycles.
/// `representatives` (dim C^j × g) holds one cycle per generator, torsion
/// generators first; `coordinates` (g × dim C^j) sends a cycle to its class
/// (entries of torsion coordinates are only meaningful modulo `moduli`).
struct CohomologyClassGroup
{
    Ring ring = Ring::rationals();
    int degree = 0;
    FgModule value;
    Matrix representatives;
    Matrix coordinates;
    std::vector<Rational> moduli; // 0 for free generators

    std::size_t generators() const { return moduli.size(); }
    std::size_t rank() const { return value.free_rank(); }
    bool is_zero() const { return value.is_zero(); }

    /// Reduces a coordinate column block modulo the torsion moduli.
    Matrix reduce_coordinates(Matrix m) const
    {
        if (ring.is_field())
            return m;
        for (std::size_t i = 0; i < moduli.size(); ++i) {
            if (moduli[i] == 0)
                continue;
            Integer d = numerator(moduli[i]);
            for (std::size_t j = 0; j < m.cols(); ++j) {
                Integer x = numerator(m(i, j)) % d;
                if (x < 0)
                    x += d;
                m.set(i, j, Rational(x));
            }
        }
        return m;
    }
};

namespace detail {

// Over a field: cycles from the row echelon form of d^j (a cycle is determined
// by its free coordinates), classes from the free coordinates of boundaries.
inline CohomologyClassGroup field_cohomology(const ChainComplex& c, int j)
{
    const Ring& ring = c.ring();
    CohomologyClassGroup h;
    h.ring = ring;
    h.degree = j;
    const std::size_t n = c.dim(j);
    RowEchelon out = row_reduce(c.differential(j));
    std::vector<std::size_t> free_cols;
    for (std::size_t col = 0, p = 0; col < n; ++col) {
        if (p < out.pivots.size() && out.pivots[p] == col)
            ++p;
        else
            free_cols.push_back(col);
    }
    const std::size_t k = free_cols.size();
    Matrix cycles(ring, n, k);
    for (std::size_t f = 0; f < k; ++f) {
        cycles.set(free_cols[f], f, 1);
        for (std::size_t i = 0; i < out.pivots.size(); ++i)
            if (out.reduced(i, free_cols[f]) != 0)
                cycles.set(out.pivots[i], f, ring.neg(out.reduced(i, free_cols[f])));
    }
    Matrix boundary = c.differential(j - 1).select_rows(free_cols); // k × m
    RowEchelon in = row_reduce(boundary.transpose());
    std::vector<bool> hit(k, false);
    for (auto p : in.pivots)
        hit[p] = true;
    std::vector<std::size_t> gens;
    for (std::size_t i = 0; i < k; ++i)
        if (!hit[i])
            gens.push_back(i);
    const std::size_t g = gens.size();
    // v ≡ v - Σ_p v_p row_p, which vanishes on pivot positions
    Matrix quotient(ring, g, k);
    for (std::size_t a = 0; a < g; ++a) {
        quotient.set(a, gens[a], 1);
        for (std::size_t r = 0; r < in.pivots.size(); ++r)
            if (in.reduced(r, gens[a]) != 0)
                quotient.set(a, in.pivots[r], ring.neg(in.reduced(r, gens[a])));
    }
    h.value = FgModule::from_invariants(ring, {}, g);
    h.moduli.assign(g, Rational(0));
    h.representatives = cycles.select_cols(gens);
    h.coordinates = Matrix(ring, g, n);
    for (std::size_t a = 0; a < g; ++a)
        for (std::size_t f = 0; f < k; ++f)
            if (quotient(a, f) != 0)
                h.coordinates.set(a, free_cols[f], quotient(a, f));
    return h;
}

} // namespace detail

inline CohomologyClassGroup cohomology(const ChainComplex& c, int j)
{
    const Ring& ring = c.ring();
    CohomologyClassGroup h;
    h.ring = ring;
    h.degree = j;
    const std::size_t n = c.dim(j);
    if (n == 0) {
        h.value = FgModule(ring, 0);
        h.representatives = Matrix(ring, 0, 0);
        h.coordinates = Matrix(ring, 0, 0);
        return h;
    }
    if (ring.is_field())
        return detail::field_cohomology(c, j);
    SmithForm out = smith_normal_form(c.differential(j), {.left = false, .right = true});
    const std::size_t k = n - out.rank;
    Matrix cycles = out.right.block(0, n, out.rank, n);            // n × k
    Matrix cycle_coords = out.right_inverse.block(out.rank, n, 0, n); // k × n
    Matrix boundary = cycle_coords * c.differential(j - 1);          // k × m
    SmithForm in = smith_normal_form(boundary, {.left = true, .right = false});

    std::vector<std::size_t> torsion_idx, free_idx;
    for (std::size_t i = 0; i < k; ++i) {
        if (i >= in.rank)
            free_idx.push_back(i);
        else if (!ring.is_unit(in.diagonal(i, i)))
            torsion_idx.push_back(i);
    }
    std::vector<std::size_t> idx = torsion_idx;
    idx.insert(idx.end(), free_idx.begin(), free_idx.end());
    std::vector<Rational> torsion;
    for (auto i : torsion_idx) {
        torsion.push_back(in.diagonal(i, i));
        h.moduli.push_back(in.diagonal(i, i));
    }
    for (std::size_t f = 0; f < free_idx.size(); ++f)
        h.moduli.push_back(Rational(0));
    h.value = FgModule::from_invariants(ring, torsion, free_idx.size());
    h.representatives = cycles * in.left_inverse.select_cols(idx);
    h.coordinates = in.left.select_rows(idx) * cycle_coords;
    return h;
}

/// Cohomology in every degree of the stored range.
class CohomologyTable
{
public:
    CohomologyTable() = default;

    explicit CohomologyTable(const ChainComplex& c) : ring_(c.ring())
    {
        for (int k = c.lowest(); !c.empty_range() && k <= c.highest(); ++k)
            groups_.emplace(k, cohomology(c, k));
    }

    const CohomologyClassGroup& at(int j) const
    {
        auto it = groups_.find(j);
        if (it != groups_.end())
            return it->second;
        auto [pos, inserted] = zero_.try_emplace(j);
        if (inserted) {
            pos->second.ring = ring_;
            pos->second.degree = j;
            pos->second.value = FgModule(ring_, 0);
            pos->second.representatives = Matrix(ring_, 0, 0);
            pos->second.coordinates = Matrix(ring_, 0, 0);
        }
        return pos->second;
    }

    bool is_acyclic() const
    {
        for (auto& [k, g] : groups_)
            if (!g.is_zero())
                return false;
        return true;
    }

    std::optional<int> first_nonzero_degree() const
    {
        for (auto& [k, g] : groups_)
            if (!g.is_zero())
                return k;
        return std::nullopt;
    }

    const std::map<int, CohomologyClassGroup>& groups() const { return groups_; }

private:
    Ring ring_ = Ring::rationals();
    std::map<int, CohomologyClassGroup> groups_;
    mutable std::map<int, CohomologyClassGroup> zero_;
};

/// Matrix of H^j(f) in the stored generator bases (target generators × source generators).
inline Matrix induced_map(const ChainMap& f, int j, const CohomologyClassGroup& src, const CohomologyClassGroup& tgt)
{
    const Ring& ring = f.source().ring();
    if (src.generators() == 0 || tgt.generators() == 0)
        return Matrix(ring, tgt.generators(), src.generators());
    return tgt.reduce_coordinates(tgt.coordinates * f.component(j) * src.representatives);
}

inline Matrix induced_map_on_cohomology(const ChainMap& f, int j)
{
    return induced_map(f, j, cohomology(f.source(), j), cohomology(f.target(), j));
}

inline ModuleMap induced_module_map(const ChainMap& f, int j, const CohomologyClassGroup& src,
                                    const CohomologyClassGroup& tgt)
{
    return ModuleMap{src.value, tgt.value, induced_map(f, j, src, tgt)};
}

struct QuasiIsoVerdict
{
    bool holds = true;
    std::optional<int> failing_degree;
};

inline QuasiIsoVerdict is_quasi_iso(const ChainMap& f, const CohomologyTable& src, const CohomologyTable& tgt)
{
    auto [lo, hi] = joint_range(f.source(), f.target());
    for (int j = lo; j <= hi; ++j) {
        const auto& hs = src.at(j);
        const auto& ht = tgt.at(j);
        if (hs.is_zero() && ht.is_zero())
            continue;
        if (!isomorphic(hs.value, ht.value) || !is_isomorphism(induced_module_map(f, j, hs, ht)))
            return {false, j};
    }
    return {};
}

inline QuasiIsoVerdict is_quasi_iso(const ChainMap& f)
{
    return is_quasi_iso(f, CohomologyTable(f.source()), CohomologyTable(f.target()));
}

inline bool is_acyclic(const ChainComplex& c) { return CohomologyTable(c).is_acyclic(); }

// ---------------------------------------------------------------------------
// Fibers

/// fib(f)^n = A^n ⊕ B^{n-1} with d(a, b) = (d a, f a − d b), for f : A → B.
/// The projection fib(f) → A and the inclusion B^{n-1} → fib(f)^n (which
/// carries the connecting map H^{n-1}(B) → H^n(fib)) come with it.
struct FiberSequence
{
    ChainComplex fiber;
    ChainMap projection; // fib(f) → A

    /// Matrix of b ↦ (0, b) from B^{n-1} into fib(f)^n.
    Matrix connecting_inclusion(const ChainMap& f, int n) const
    {
        const Ring& ring = f.source().ring();
        std::size_t a = f.source().dim(n), b = f.target().dim(n - 1);
        Matrix m(ring, a + b, b);
        m.paste(Matrix::identity(ring, b), a, 0);
        return m;
    }
};

inline FiberSequence fiber_sequence(const ChainMap& f)
{
    const ChainComplex& A = f.source();
    const ChainComplex& B = f.target();
    const Ring& ring = A.ring();
    int lo, hi;
    if (A.empty_range() && B.empty_range()) {
        ChainComplex z(ring);
        return {z, ChainMap::zero(z, A)};
    }
    if (A.empty_range()) {
        lo = B.lowest() + 1;
        hi = B.highest() + 1;
    } else if (B.empty_range()) {
        lo = A.lowest();
        hi = A.highest();
    } else {
        lo = std::min(A.lowest(), B.lowest() + 1);
        hi = std::max(A.highest(), B.highest() + 1);
    }
    std::vector<std::size_t> dims;
    std::vector<Matrix> ds;
    for (int n = lo; n <= hi; ++n)
        dims.push_back(A.dim(n) + B.dim(n - 1));
    for (int n = lo; n < hi; ++n) {
        Matrix d(ring, A.dim(n + 1) + B.dim(n), A.dim(n) + B.dim(n - 1));
        d.paste(A.differential(n), 0, 0);
        d.paste(f.component(n), A.dim(n + 1), 0);
        d.paste(B.differential(n - 1).scaled(Rational(-1)), A.dim(n + 1), A.dim(n));
        ds.push_back(std::move(d));
    }
    ChainComplex fib(ring, lo, std::move(dims), std::move(ds));
    std::map<int, Matrix> proj;
    for (int n = lo; n <= hi; ++n)
        if (A.dim(n) && fib.dim(n)) {
            Matrix p(ring, A.dim(n), fib.dim(n));
            p.paste(Matrix::identity(ring, A.dim(n)), 0, 0);
            proj.emplace(n, std::move(p));
        }
    ChainMap projection(fib, A, std::move(proj));
    return {fib, projection};
}

inline ChainComplex fiber(const ChainMap& f) { return fiber_sequence(f).fiber; }

} // namespace microlocal::exactalg
