#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microlocal/towers/tower.hpp"

namespace microlocal::towers {

struct StructureMapCheck
{
    std::size_t from = 0; // stratum index of the source
    std::size_t to = 0;
    std::vector<int> non_surjective_degrees;
};

struct CriticalComplexCheck
{
    Rational value;
    std::vector<int> lim_failures;       // X^k_c → lim_{r<c} X^k_r not an isomorphism
    std::vector<int> colim_failures;     // colim_{t>c} H^j(X_t) → H^j(X_c) not an isomorphism
    std::vector<int> onto_lim_failures;  // H^j(X_c) → lim_{r<c} H^j(X_r) not surjective
    std::vector<int> bij_lim_failures;   // … not bijective
};

struct PairDegree
{
    std::size_t lower = 0; // stratum indices, lower ≤ upper
    std::size_t upper = 0;
    int degree = 0;
};

struct ComplexConstancyReport
{
    int lowest_degree = 0;
    int highest_degree = -1;
    std::vector<StructureMapCheck> structure_maps; // degreewise surjectivity, one per down map
    std::vector<CriticalComplexCheck> critical;
    std::vector<PairDegree> rho_not_surjective;    // H^j(ρ) fails to be onto
    std::vector<PairDegree> rho_not_isomorphism;   // conclusion failures

    bool surjectivity_holds() const
    {
        for (auto& s : structure_maps)
            if (!s.non_surjective_degrees.empty())
                return false;
        return true;
    }
    bool lim_condition_holds() const
    {
        for (auto& c : critical)
            if (!c.lim_failures.empty())
                return false;
        return true;
    }
    bool colim_condition_holds() const
    {
        for (auto& c : critical)
            if (!c.colim_failures.empty())
                return false;
        return true;
    }
    bool onto_lim_holds() const
    {
        for (auto& c : critical)
            if (!c.onto_lim_failures.empty())
                return false;
        return true;
    }
    bool bij_lim_holds() const
    {
        for (auto& c : critical)
            if (!c.bij_lim_failures.empty())
                return false;
        return true;
    }
    bool hypotheses_hold() const { return surjectivity_holds() && lim_condition_holds() && colim_condition_holds(); }
    bool assertions_hold() const { return onto_lim_holds() && rho_not_surjective.empty() && bij_lim_holds(); }
    bool conclusion_holds() const { return rho_not_isomorphism.empty(); }
    bool theorem_violation() const { return hypotheses_hold() && !conclusion_holds(); }

    /// Names of failing hypotheses and assertions, in a fixed order.
    std::vector<std::string> failures() const
    {
        std::vector<std::string> out;
        if (!surjectivity_holds())
            out.push_back("degreewise-surjective");
        if (!lim_condition_holds())
            out.push_back("lim-isomorphism");
        if (!colim_condition_holds())
            out.push_back("cohomology-colim-isomorphism");
        if (!onto_lim_holds())
            out.push_back("onto-lim-cohomology");
        if (!rho_not_surjective.empty())
            out.push_back("rho-cohomology-surjective");
        if (!bij_lim_holds())
            out.push_back("bijective-onto-lim-cohomology");
        return out;
    }
};

namespace detail {

inline std::pair<int, int> support_range(const TameTower<ComplexTraits>& t)
{
    int lo = 0, hi = -1;
    bool any = false;
    for (auto& p : t.pieces())
        for (int k : p.support()) {
            lo = any ? std::min(lo, k) : k;
            hi = any ? std::max(hi, k) : k;
            any = true;
        }
    return {lo, hi};
}

} // namespace detail

/// Checks the hypotheses and intermediate assertions of the cohomological
/// constancy criterion on a tame tower of complexes, and evaluates the
/// conclusion (H^j(ρ_{s,t}) an isomorphism for all strata and j) on its own.
/// Degrees default to the union of supports.
inline ComplexConstancyReport check_constant_complexes(const TameTower<ComplexTraits>& t,
                                                       std::optional<std::pair<int, int>> degrees = std::nullopt)
{
    ComplexConstancyReport r;
    auto [lo, hi] = degrees ? *degrees : detail::support_range(t);
    r.lowest_degree = lo;
    r.highest_degree = hi;
    const std::size_t n = t.strata();

    std::vector<exactalg::CohomologyTable> h;
    h.reserve(n);
    for (auto& p : t.pieces())
        h.emplace_back(p);

    auto induced = [&](const ChainMap& f, std::size_t src, std::size_t tgt, int j) {
        return exactalg::induced_module_map(f, j, h[src].at(j), h[tgt].at(j));
    };

    for (std::size_t i = 0; i + 1 < n; ++i) {
        StructureMapCheck s{i + 1, i, {}};
        const ChainMap& f = t.down(i);
        for (int k = lo; k <= hi; ++k)
            if (t.piece(i).dim(k) && !exactalg::is_surjective_matrix(f.component(k)))
                s.non_surjective_degrees.push_back(k);
        r.structure_maps.push_back(std::move(s));
    }

    for (std::size_t c = 0; c < t.critical_values().size(); ++c) {
        CriticalComplexCheck cc{t.critical_values()[c]};
        const std::size_t at = 2 * c + 1;
        const ChainMap& to_lim = t.down(at - 1); // X_c → lim below
        const ChainMap& from_colim = t.down(at); // colim above → X_c
        for (int k = lo; k <= hi; ++k) {
            const auto& src = t.piece(at);
            const auto& tgt = t.piece(at - 1);
            if (src.dim(k) != tgt.dim(k) || (src.dim(k) && !exactalg::is_invertible_matrix(to_lim.component(k))))
                cc.lim_failures.push_back(k);
        }
        for (int j = lo; j <= hi; ++j) {
            if (!exactalg::is_isomorphism(induced(from_colim, at + 1, at, j)))
                cc.colim_failures.push_back(j);
            auto to_lim_h = induced(to_lim, at, at - 1, j);
            bool onto = exactalg::is_surjective(to_lim_h);
            if (!onto)
                cc.onto_lim_failures.push_back(j);
            if (!onto || !exactalg::is_injective(to_lim_h))
                cc.bij_lim_failures.push_back(j);
        }
        r.critical.push_back(std::move(cc));
    }

    for (std::size_t a = 0; a < n; ++a) {
        ChainMap m = ChainMap::identity(t.piece(a));
        for (std::size_t b = a + 1; b < n; ++b) {
            m = exactalg::compose(m, t.down(b - 1));
            for (int j = lo; j <= hi; ++j) {
                auto hm = induced(m, b, a, j);
                bool onto = exactalg::is_surjective(hm);
                if (!onto)
                    r.rho_not_surjective.push_back({a, b, j});
                if (!onto || !exactalg::is_injective(hm))
                    r.rho_not_isomorphism.push_back({a, b, j});
            }
        }
    }
    return r;
}

} // namespace microlocal::towers
