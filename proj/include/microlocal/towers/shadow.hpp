#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "microlocal/towers/constant_sets.hpp"
#include "microlocal/towers/mittag_leffler.hpp"

namespace microlocal::towers {

/// Claimed value W of π_n(lim_{r<s} X_r) at a critical value s, with the maps
/// π_n(X_s) → W and W → lim_{r<s} π_n(X_r).
template <class Traits>
struct LimitWitness
{
    typename Traits::Value value;
    typename Traits::Map from_point;
    typename Traits::Map to_lim;
};

template <class Traits>
struct ShadowDegree
{
    TameTower<Traits> tower;
    std::vector<LimitWitness<Traits>> witnesses; // one per critical value
};

/// Homotopy-group shadow of a tower of spaces: pointed sets in degree 0,
/// finite groups in degree 1, finitely generated abelian groups above, with
/// the base points fixed by the pointed structure.
struct HomotopyShadow
{
    int n_max = 0;
    std::optional<ShadowDegree<PointedSetTraits>> degree0;
    std::optional<ShadowDegree<GroupTraits>> degree1;
    std::map<int, ShadowDegree<ModuleTraits>> higher;
};

struct ShadowCriticalCheck
{
    Rational value;
    bool colim_bijective = true;    // colim_{t>s} π_n → π_n(X_s)
    bool onto_lim = true;           // π_n(X_s) → lim_{r<s} π_n surjective
    bool witness_onto_lim = true;   // π_n(lim) → lim π_n surjective
    bool witness_bijective = true;  // … bijective (vanishing lim¹)
    bool bijective_onto_lim = true; // π_n(X_s) → lim_{r<s} π_n bijective
};

struct ShadowDegreeReport
{
    int n = 0;
    std::vector<ShadowCriticalCheck> critical;
    std::vector<std::pair<std::size_t, std::size_t>> non_surjective_maps; // (from, to) strata
    std::optional<bool> next_degree_ml;
    bool pipeline_constant = true; // criterion says every ρ is bijective
    bool constant = true;          // enumeration over all stratum pairs
};

struct ShadowReport
{
    std::vector<ShadowDegreeReport> degrees;
    bool all_constant = true;
    bool pipeline_all_constant = true;
    bool theorem_violation = false;
};

namespace detail {

template <class Traits>
NTower<Traits> chain_below(const TameTower<Traits>& t, std::size_t top)
{
    std::vector<typename Traits::Value> xs(t.pieces().begin(), t.pieces().begin() + std::ptrdiff_t(top + 1));
    std::vector<typename Traits::Map> maps(t.down_maps().begin(), t.down_maps().begin() + std::ptrdiff_t(top));
    return NTower<Traits>(xs, maps, Traits::identity(xs.back()));
}

template <class Traits>
void validate_witnesses(const ShadowDegree<Traits>& d, int n)
{
    const auto& t = d.tower;
    if (d.witnesses.size() != t.critical_values().size())
        throw InvalidInput("degree " + std::to_string(n) + ": expected one limit witness per critical value");
    for (std::size_t c = 0; c < d.witnesses.size(); ++c) {
        const auto& w = d.witnesses[c];
        const std::size_t at = 2 * c + 1;
        std::string where = "degree " + std::to_string(n) + ", critical value " + to_string(t.critical_values()[c]);
        try {
            Traits::validate(w.from_point, t.piece(at), w.value);
            Traits::validate(w.to_lim, w.value, t.piece(at - 1));
        } catch (const InvalidInput& e) {
            throw InvalidInput("inconsistent limit witness at " + where + ": " + e.what());
        }
        if (!Traits::equal(Traits::compose(w.to_lim, w.from_point), t.down(at - 1)))
            throw InvalidInput("inconsistent limit witness at " + where
                               + ": comparison maps do not commute with the tower");
    }
}

template <class Traits>
ShadowDegreeReport run_degree(const ShadowDegree<Traits>& d, int n, std::optional<bool> next_ml)
{
    const auto& t = d.tower;
    ShadowDegreeReport r;
    r.n = n;
    r.next_degree_ml = next_ml;
    for (std::size_t i = 0; i < t.down_maps().size(); ++i)
        if (!Traits::is_surjective(t.down(i), t.piece(i + 1), t.piece(i)))
            r.non_surjective_maps.push_back({i + 1, i});
    for (std::size_t c = 0; c < t.critical_values().size(); ++c) {
        const std::size_t at = 2 * c + 1;
        ShadowCriticalCheck cc{t.critical_values()[c]};
        auto colim = colim_above(t, cc.value);
        auto lim = lim_below(t, cc.value);
        cc.colim_bijective = Traits::is_bijective(colim.comparison, colim.value, t.piece(at));
        cc.onto_lim = Traits::is_surjective(lim.comparison, t.piece(at), lim.value);
        const auto& w = d.witnesses[c];
        cc.witness_onto_lim = Traits::is_surjective(w.to_lim, w.value, lim.value);
        cc.witness_bijective = Traits::is_bijective(w.to_lim, w.value, lim.value);
        cc.bijective_onto_lim = Traits::is_bijective(lim.comparison, t.piece(at), lim.value);
        r.critical.push_back(cc);
        r.pipeline_constant = r.pipeline_constant && cc.colim_bijective && cc.bijective_onto_lim;
    }
    r.pipeline_constant = r.pipeline_constant && r.non_surjective_maps.empty();
    r.constant = check_constant(t).constant;
    return r;
}

template <class Traits>
std::optional<bool> ml_of(const std::optional<ShadowDegree<Traits>>& d)
{
    if (!d)
        return std::nullopt;
    bool holds = true;
    for (std::size_t c = 0; c < d->tower.critical_values().size(); ++c)
        holds = holds && is_mittag_leffler(chain_below(d->tower, 2 * c)).holds;
    return holds;
}

} // namespace detail

/// Runs the per-degree pipeline (colim bijectivity, surjectivity onto the
/// limit read through the supplied witness, surjectivity of every structure
/// map, bijectivity onto the limit) and the exhaustive constancy check.
/// Throws InvalidInput when a limit witness does not commute with the tower.
inline ShadowReport check_homotopy_shadow(const HomotopyShadow& h)
{
    if (h.n_max < 0)
        throw InvalidInput("n_max must be nonnegative");
    if (!h.degree0)
        throw InvalidInput("shadow needs a degree-0 tower");
    if (h.n_max >= 1 && !h.degree1)
        throw InvalidInput("shadow needs a degree-1 tower");
    for (int n = 2; n <= h.n_max; ++n)
        if (!h.higher.count(n))
            throw InvalidInput("shadow needs a tower in degree " + std::to_string(n));
    detail::validate_witnesses(*h.degree0, 0);
    if (h.n_max >= 1)
        detail::validate_witnesses(*h.degree1, 1);
    for (int n = 2; n <= h.n_max; ++n)
        detail::validate_witnesses(h.higher.at(n), n);

    auto higher_ml = [&](int n) -> std::optional<bool> {
        auto it = h.higher.find(n);
        if (n > h.n_max || it == h.higher.end())
            return std::nullopt;
        return detail::ml_of(std::optional<ShadowDegree<ModuleTraits>>(it->second));
    };

    ShadowReport r;
    r.degrees.push_back(detail::run_degree(*h.degree0, 0, h.n_max >= 1 ? detail::ml_of(h.degree1) : std::nullopt));
    if (h.n_max >= 1)
        r.degrees.push_back(detail::run_degree(*h.degree1, 1, higher_ml(2)));
    for (int n = 2; n <= h.n_max; ++n)
        r.degrees.push_back(detail::run_degree(h.higher.at(n), n, higher_ml(n + 1)));
    for (auto& d : r.degrees) {
        r.all_constant = r.all_constant && d.constant;
        r.pipeline_all_constant = r.pipeline_all_constant && d.pipeline_constant;
    }
    r.theorem_violation = r.pipeline_all_constant && !r.all_constant;
    return r;
}

} // namespace microlocal::towers
