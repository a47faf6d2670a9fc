#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "microlocal/towers/tower.hpp"

namespace microlocal::towers {

enum class Lim1 { yes, no, unknown };

inline const char* to_string(Lim1 v)
{
    switch (v) {
    case Lim1::yes: return "yes";
    case Lim1::no: return "no";
    case Lim1::unknown: return "unknown";
    }
    return "unknown";
}

struct MLVerdict
{
    bool holds = true;
    /// Least k with Im(X_{n+j} → X_n) independent of j ≥ k, for every n.
    std::optional<std::size_t> stabilization_index;
    /// Human-readable certificate for failures (empty when ML holds).
    std::string counterexample;
    Lim1 lim1_vanishes = Lim1::yes;
};

namespace detail {

inline Matrix change_ring(const Matrix& m, const Ring& ring)
{
    Matrix out(ring, m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out.set(i, j, m(i, j));
    return out;
}

inline Integer abs_det(const Matrix& square)
{
    auto s = exactalg::smith_normal_form(square, {.left = false, .right = false});
    if (s.rank < square.rows())
        return 0;
    Integer d = 1;
    for (auto& x : s.divisors())
        d *= abs(numerator(x));
    return d;
}

/// Rank of the image of `gens` in the module over the fraction field.
inline std::size_t image_rational_rank(const FgModule& m, const Matrix& gens)
{
    Ring q = m.ring().is_field() ? m.ring() : Ring::rationals();
    Matrix rel = change_ring(m.relations(), q);
    return exactalg::rank(Matrix::hstack(change_ring(gens, q), rel)) - exactalg::rank(rel);
}

/// Endomorphism induced on the free quotient of m (torsion killed), in the
/// coordinates of the Smith basis of the relations.
inline Matrix free_quotient_endomorphism(const FgModule& m, const Matrix& endo)
{
    auto s = exactalg::smith_normal_form(m.relations(), {.left = true, .right = false});
    Matrix conj = s.left * endo * s.left_inverse;
    return conj.block(s.rank, conj.rows(), s.rank, conj.cols());
}

template <class Traits>
std::size_t prefix_stabilization(const NTower<Traits>& t, std::size_t tail_index,
                                 const auto& images_equal)
{
    std::size_t index = tail_index;
    const std::size_t big_n = t.periodic_from();
    for (std::size_t n = 0; n < big_n; ++n) {
        std::size_t horizon = big_n + tail_index - n;
        auto final_map = t.map(n, n + horizon);
        std::size_t j = horizon;
        while (j > 0 && images_equal(t.map(n, n + j - 1), final_map, t.value(n)))
            --j;
        index = std::max(index, j);
    }
    return index;
}

} // namespace detail

/// Mittag-Leffler decision for an eventually periodic tower of finitely
/// generated modules. ML at every index reduces to the image chain of the
/// tail endomorphism; over ℤ a non-stabilizing chain is certified by the
/// determinant of the tail on the stable image lattice of the free quotient.
inline MLVerdict is_mittag_leffler(const NTower<ModuleTraits>& t)
{
    const FgModule& x = t.value(t.periodic_from());
    const Matrix& m = t.tail().matrix;
    const Ring& ring = x.ring();
    auto images_equal = [](const ModuleMap& a, const ModuleMap& b, const FgModule& target) {
        return exactalg::Submodule{target, a.matrix} == exactalg::Submodule{target, b.matrix};
    };
    auto power = [&](std::size_t k) {
        Matrix p = Matrix::identity(ring, x.generators());
        for (std::size_t i = 0; i < k; ++i)
            p = m * p;
        return p;
    };

    // rational rank of Im(m^k) descends and stabilizes within generators() steps
    std::size_t k0 = 0;
    Matrix pk = power(0);
    std::size_t r = detail::image_rational_rank(x, pk);
    for (;;) {
        Matrix next = m * pk;
        std::size_t rn = detail::image_rational_rank(x, next);
        if (rn == r)
            break;
        r = rn;
        pk = next;
        ++k0;
    }

    MLVerdict v;
    if (!ring.is_field()) {
        Matrix a = detail::free_quotient_endomorphism(x, m);
        if (a.rows() > 0) {
            Matrix ak = Matrix::identity(ring, a.rows());
            for (std::size_t i = 0; i < k0; ++i)
                ak = a * ak;
            auto s = exactalg::smith_normal_form(ak, {.left = true, .right = false});
            Matrix basis(ring, a.rows(), s.rank);
            for (std::size_t i = 0; i < s.rank; ++i)
                for (std::size_t row = 0; row < a.rows(); ++row)
                    basis.set(row, i, ring.mul(s.left_inverse(row, i), s.diagonal(i, i)));
            if (s.rank > 0) {
                auto c = exactalg::solve(basis, a * basis);
                if (!c)
                    throw std::logic_error("tail does not preserve its image lattice");
                Integer det = detail::abs_det(*c);
                if (det != 1) {
                    v.holds = false;
                    v.lim1_vanishes = Lim1::no;
                    v.counterexample = "images of the tail strictly decrease forever: it acts on the stable image "
                                       "lattice with determinant of absolute value "
                                       + det.str();
                    return v;
                }
            }
        }
    }
    // the free part is stable from k0 on; the torsion part can only shrink finitely often
    std::size_t k = k0;
    for (std::size_t guard = 0;; ++guard) {
        if (guard > 4096)
            throw std::logic_error("image chain failed to stabilize");
        Matrix a = power(k), b = power(k + 1);
        if (exactalg::Submodule{x, a} == exactalg::Submodule{x, b})
            break;
        ++k;
    }
    v.stabilization_index = detail::prefix_stabilization(t, k, images_equal);
    return v;
}

/// Finite groups (or any set-valued tower): image chains of finite sets
/// always stabilize.
template <class Traits>
    requires std::is_same_v<typename Traits::Map, SetMap>
MLVerdict is_mittag_leffler(const NTower<Traits>& t)
{
    auto image = [](const SetMap& f) { return std::set<std::size_t>(f.begin(), f.end()); };
    auto images_equal = [&](const SetMap& a, const SetMap& b, const auto&) { return image(a) == image(b); };
    std::size_t k = 0;
    SetMap p = identity_map(t.tail().size());
    for (;;) {
        SetMap next = compose_maps(t.tail(), p);
        if (image(next) == image(p))
            break;
        p = next;
        ++k;
    }
    MLVerdict v;
    v.stabilization_index = detail::prefix_stabilization(t, k, images_equal);
    return v;
}

/// The tower of H^j with induced maps.
inline NTower<ModuleTraits> cohomology_tower(const NTower<ComplexTraits>& t, int j)
{
    std::vector<exactalg::CohomologyClassGroup> h;
    for (auto& x : t.prefix())
        h.push_back(exactalg::cohomology(x, j));
    std::vector<FgModule> values;
    for (auto& g : h)
        values.push_back(g.value);
    std::vector<ModuleMap> maps;
    for (std::size_t i = 0; i < t.prefix_maps().size(); ++i)
        maps.push_back(exactalg::induced_module_map(t.prefix_maps()[i], j, h[i + 1], h[i]));
    ModuleMap tail = exactalg::induced_module_map(t.tail(), j, h.back(), h.back());
    return NTower<ModuleTraits>(values, maps, tail);
}

// ---------------------------------------------------------------------------
// Milnor sequence check

enum class MilnorStatus { isomorphism_verified, lim1_obstruction, precondition_violated, mismatch };

inline const char* to_string(MilnorStatus s)
{
    switch (s) {
    case MilnorStatus::isomorphism_verified: return "isomorphism-verified";
    case MilnorStatus::lim1_obstruction: return "lim1-obstruction-present";
    case MilnorStatus::precondition_violated: return "precondition-violated";
    case MilnorStatus::mismatch: return "mismatch";
    }
    return "mismatch";
}

struct MilnorEntry
{
    std::string label;                 // which limit was compared
    std::size_t rank_of_limit_cohomology = 0; // rank H_n(lim X)
    std::size_t rank_of_cohomology_limit = 0; // rank lim H_n(X)
    bool equal() const { return rank_of_limit_cohomology == rank_of_cohomology_limit; }
};

struct MilnorReport
{
    int n = 0; // homological degree: H_n = H^{-n}
    MilnorStatus status = MilnorStatus::isomorphism_verified;
    std::optional<MLVerdict> next_degree_ml;
    std::vector<MilnorEntry> entries;
    std::string detail;
};

namespace detail {

/// Ranks over the fraction field of H^{-n}(lim) and lim H^{-n} for the finite
/// chain X_0 ← X_1 ← … ← X_m (maps[i] : X_{i+1} → X_i). Both limits are
/// computed as kernels of x ↦ (x_i − f_i(x_{i+1}))_i.
inline MilnorEntry compare_finite_chain(std::string label, const std::vector<ChainComplex>& xs,
                                        const std::vector<ChainMap>& maps, int n)
{
    const Ring ring0 = xs.front().ring();
    const Ring q = ring0.is_field() ? ring0 : Ring::rationals();
    const std::size_t m = xs.size();
    const int j = -n;

    // degreewise limit complex in degrees j-1, j, j+1
    auto delta = [&](int k) {
        std::size_t cols = 0, rows = 0;
        for (std::size_t i = 0; i < m; ++i)
            cols += xs[i].dim(k);
        for (std::size_t i = 0; i + 1 < m; ++i)
            rows += xs[i].dim(k);
        Matrix d(q, rows, cols);
        std::size_t r0 = 0, c0 = 0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            d.paste(Matrix::identity(q, xs[i].dim(k)), r0, c0);
            Matrix f = change_ring(maps[i].component(k), q).scaled(Rational(-1));
            d.paste(f, r0, c0 + xs[i].dim(k));
            r0 += xs[i].dim(k);
            c0 += xs[i].dim(k);
        }
        return d;
    };
    auto total_d = [&](int k) {
        Matrix d(q, 0, 0);
        for (std::size_t i = 0; i < m; ++i)
            d = Matrix::direct_sum(d, change_ring(xs[i].differential(k), q));
        return d;
    };
    Matrix kprev = exactalg::kernel_basis(delta(j - 1));
    Matrix kcur = exactalg::kernel_basis(delta(j));
    Matrix knext = exactalg::kernel_basis(delta(j + 1));
    auto restrict = [&](const Matrix& from, const Matrix& to, int k) {
        auto sol = exactalg::solve(to, total_d(k) * from);
        if (!sol)
            throw std::logic_error("limit is not a subcomplex");
        return *sol;
    };
    Matrix din = restrict(kprev, kcur, j - 1);
    Matrix dout = restrict(kcur, knext, j);
    std::size_t h_lim = kcur.cols() - exactalg::rank(din) - exactalg::rank(dout);

    // limit of the cohomology chain over the fraction field
    std::vector<exactalg::CohomologyClassGroup> hs;
    for (auto& x : xs) {
        ChainComplex xq = x;
        if (!ring0.is_field()) {
            std::map<int, std::size_t> dims;
            std::map<int, Matrix> ds;
            for (int k : x.support())
                dims[k] = x.dim(k);
            for (int k : x.support())
                if (x.dim(k + 1))
                    ds.emplace(k, change_ring(x.differential(k), q));
            xq = ChainComplex::from_map(q, dims, ds);
        }
        hs.push_back(exactalg::cohomology(xq, j));
    }
    std::size_t rows = 0, cols = 0;
    for (std::size_t i = 0; i < m; ++i)
        cols += hs[i].generators();
    for (std::size_t i = 0; i + 1 < m; ++i)
        rows += hs[i].generators();
    Matrix hd(q, rows, cols);
    std::size_t r0 = 0, c0 = 0;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        hd.paste(Matrix::identity(q, hs[i].generators()), r0, c0);
        if (hs[i].generators() && hs[i + 1].generators()) {
            Matrix f = hs[i].coordinates * change_ring(maps[i].component(j), q) * hs[i + 1].representatives;
            hd.paste(f.scaled(Rational(-1)), r0, c0 + hs[i].generators());
        }
        r0 += hs[i].generators();
        c0 += hs[i].generators();
    }
    std::size_t lim_h = cols - exactalg::rank(hd);
    return {std::move(label), h_lim, lim_h};
}

} // namespace detail

/// Milnor sequence check for an eventually periodic tower of complexes.
inline MilnorReport milnor_check(const NTower<ComplexTraits>& t, int n)
{
    MilnorReport r;
    r.n = n;
    r.next_degree_ml = is_mittag_leffler(cohomology_tower(t, -(n + 1)));
    if (!r.next_degree_ml->holds) {
        r.status = MilnorStatus::lim1_obstruction;
        r.detail = "lim1 obstruction present; exact sequence not finitely checkable";
        return r;
    }
    for (std::size_t i = 0; i <= t.prefix_maps().size(); ++i) {
        const ChainMap& f = t.step(i);
        if (!ComplexTraits::is_surjective(f, f.source(), f.target())) {
            r.status = MilnorStatus::precondition_violated;
            r.detail = "structure map X_" + std::to_string(i + 1) + " -> X_" + std::to_string(i)
                       + " is not degreewise surjective";
            return r;
        }
    }
    // a surjective endomorphism of a finitely generated module is bijective,
    // so the limit is attained on the prefix
    r.entries.push_back(detail::compare_finite_chain("lim", t.prefix(), t.prefix_maps(), n));
    r.status = r.entries.back().equal() ? MilnorStatus::isomorphism_verified : MilnorStatus::mismatch;
    return r;
}

/// Milnor sequence check for a tame tower at every critical value s, using
/// the chain of strata below s, and for the whole line.
inline MilnorReport milnor_check(const TameTower<ComplexTraits>& t, int n)
{
    MilnorReport r;
    r.n = n;
    for (std::size_t i = 0; i < t.down_maps().size(); ++i) {
        const ChainMap& f = t.down(i);
        if (!ComplexTraits::is_surjective(f, f.source(), f.target())) {
            r.status = MilnorStatus::precondition_violated;
            r.detail = "structure map " + t.stratum_name(i + 1) + " -> " + t.stratum_name(i)
                       + " is not degreewise surjective";
            return r;
        }
    }
    auto chain = [&](std::size_t top, std::string label) {
        std::vector<ChainComplex> xs(t.pieces().begin(), t.pieces().begin() + std::ptrdiff_t(top + 1));
        std::vector<ChainMap> maps(t.down_maps().begin(), t.down_maps().begin() + std::ptrdiff_t(top));
        r.entries.push_back(detail::compare_finite_chain(std::move(label), xs, maps, n));
    };
    for (std::size_t c = 0; c < t.critical_values().size(); ++c)
        chain(2 * c, "below " + to_string(t.critical_values()[c]));
    chain(t.strata() - 1, "all");
    r.status = MilnorStatus::isomorphism_verified;
    for (auto& e : r.entries)
        if (!e.equal())
            r.status = MilnorStatus::mismatch;
    return r;
}

} // namespace microlocal::towers
