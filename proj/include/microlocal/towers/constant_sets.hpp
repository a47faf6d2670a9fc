#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microlocal/towers/tower.hpp"

namespace microlocal::towers {

struct CriticalComparison
{
    Rational value;
    bool lim_bijective = true;   // X_c → lim_{r<c} X_r
    bool colim_bijective = true; // colim_{t>c} X_t → X_c
};

struct ConstancyFailure
{
    Rational value;
    std::string side; // "lim" or "colim"
};

struct ConstancyReport
{
    std::vector<CriticalComparison> critical;
    bool criterion_satisfied = true;
    std::optional<ConstancyFailure> first_failure;
    /// Every ρ_{s,t} bijective, by enumeration over all stratum pairs.
    bool constant = true;
    /// Criterion satisfied but some ρ not bijective (never expected).
    bool theorem_violation = false;
};

/// Both displayed comparison maps of the constant functor criterion at every
/// critical value, then exhaustive bijectivity of all long-range maps.
template <class Traits>
ConstancyReport check_constant(const TameTower<Traits>& t)
{
    ConstancyReport r;
    for (std::size_t i = 0; i < t.critical_values().size(); ++i) {
        const Rational& c = t.critical_values()[i];
        auto lim = lim_below(t, c);
        auto colim = colim_above(t, c);
        CriticalComparison cc{c};
        cc.lim_bijective = Traits::is_bijective(lim.comparison, t.at(c), lim.value);
        cc.colim_bijective = Traits::is_bijective(colim.comparison, colim.value, t.at(c));
        if (!r.first_failure && (!cc.lim_bijective || !cc.colim_bijective))
            r.first_failure = ConstancyFailure{c, cc.lim_bijective ? "colim" : "lim"};
        r.criterion_satisfied = r.criterion_satisfied && cc.lim_bijective && cc.colim_bijective;
        r.critical.push_back(cc);
    }
    for (std::size_t a = 0; a < t.strata() && r.constant; ++a) {
        auto m = Traits::identity(t.piece(a));
        for (std::size_t b = a + 1; b < t.strata(); ++b) {
            m = Traits::compose(m, t.down(b - 1));
            if (!Traits::is_bijective(m, t.piece(b), t.piece(a))) {
                r.constant = false;
                break;
            }
        }
    }
    r.theorem_violation = r.criterion_satisfied && !r.constant;
    return r;
}

inline ConstancyReport check_constant_sets(const TameTower<SetTraits>& t) { return check_constant(t); }

} // namespace microlocal::towers
