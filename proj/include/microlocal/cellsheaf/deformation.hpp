#pragma once

#include <set>

#include "microlocal/cellsheaf/sections.hpp"
#include "microlocal/towers/tower.hpp"
#include "microlocal/towers/values.hpp"

namespace microlocal::cellsheaf {

/// Piecewise-linear function given by its vertex values.
struct PLFunction
{
    std::vector<Rational> values;

    const Rational& operator()(std::size_t v) const { return values.at(v); }

    Rational min_on(const Cell& c) const
    {
        Rational m = values.at(c.front());
        for (auto v : c)
            m = std::min(m, values.at(v));
        return m;
    }

    Rational max_on(const Cell& c) const
    {
        Rational m = values.at(c.front());
        for (auto v : c)
            m = std::max(m, values.at(v));
        return m;
    }

    void check(const SimplicialComplex& k) const
    {
        if (values.size() != k.vertex_count())
            throw InvalidInput("function needs one value per vertex: got " + std::to_string(values.size()) + " for "
                               + std::to_string(k.vertex_count()) + " vertices");
    }

    /// Distinct vertex values, ascending.
    std::vector<Rational> critical_values() const
    {
        std::set<Rational> s(values.begin(), values.end());
        return {s.begin(), s.end()};
    }
};

/// U_s = {φ < s}: the cells whose lowest vertex value is below s.
inline CellSet sublevel(const SimplicialComplex& k, const PLFunction& phi, const Rational& s)
{
    phi.check(k);
    CellSet out;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (phi.min_on(k.cell(i)) < s)
            out.push_back(i);
    return out;
}

/// Z_s = ⋂_{t>s} closure(U_t ∖ U_s), as the cells on which φ is constantly s.
inline CellSet z_set(const SimplicialComplex& k, const PLFunction& phi, const Rational& s)
{
    phi.check(k);
    CellSet out;
    for (std::size_t i = 0; i < k.size(); ++i)
        if (phi.min_on(k.cell(i)) == s && phi.max_on(k.cell(i)) == s)
            out.push_back(i);
    return out;
}

/// Values at which the sublevel family is sampled: one below the first
/// critical value, each critical value, the midpoints and one above the last.
inline std::vector<Rational> sample_points(const std::vector<Rational>& critical)
{
    if (critical.empty())
        return {Rational(0)};
    std::vector<Rational> out{critical.front() - 1};
    for (std::size_t i = 0; i < critical.size(); ++i) {
        if (i)
            out.push_back((critical[i - 1] + critical[i]) / 2);
        out.push_back(critical[i]);
    }
    out.push_back(critical.back() + 1);
    return out;
}

/// One instance of the non-characteristic condition: is (Γ_{X∖U_t} F)_σ ≃ 0
/// for σ in Z_s?
struct StalkCondition
{
    Rational s;
    Rational t;
    std::size_t cell;
    bool acyclic;
};

/// Is the restriction Γ(U_t) → Γ(U_s) a quasi-isomorphism? (`whole` replaces
/// U_t by the whole complex.)
struct RestrictionCheck
{
    bool whole = false;
    Rational t;
    Rational s;
    bool quasi_iso;
    std::optional<int> failing_degree;
};

struct SampleSections
{
    Rational s;
    std::size_t cells;
    std::map<int, exactalg::FgModule> cohomology;
};

struct DeformationReport
{
    std::vector<Rational> critical_values;
    std::vector<Rational> samples;
    bool exhaustive = true;  // U_t is the union of the earlier sublevels
    bool compact_closures = true;
    std::vector<std::pair<Rational, CellSet>> z_sets;
    std::vector<StalkCondition> stalk_conditions;
    std::vector<RestrictionCheck> restrictions;
    std::vector<SampleSections> sections;
    SampleSections whole;

    bool condition_holds() const
    {
        for (auto& c : stalk_conditions)
            if (!c.acyclic)
                return false;
        return true;
    }

    bool hypotheses_hold() const { return exhaustive && compact_closures && condition_holds(); }

    bool conclusion_holds() const
    {
        for (auto& r : restrictions)
            if (!r.quasi_iso)
                return false;
        return true;
    }

    bool theorem_violation() const { return hypotheses_hold() && !conclusion_holds(); }

    std::vector<StalkCondition> failures() const
    {
        std::vector<StalkCondition> out;
        for (auto& c : stalk_conditions)
            if (!c.acyclic)
                out.push_back(c);
        return out;
    }
};

namespace detail {

inline SampleSections describe(const Rational& s, const CellSet& u, const CohomologyTable& t)
{
    SampleSections out{s, u.size(), {}};
    for (auto& [j, g] : t.groups())
        if (!g.is_zero())
            out.cohomology.emplace(j, g.value);
    return out;
}

} // namespace detail

/// Tests the hypotheses of non-characteristic deformation for the sublevel
/// family of φ on the sample points, and independently its conclusion on
/// every sample pair.
inline DeformationReport check_deformation(const CellSheaf& f, const PLFunction& phi)
{
    const SimplicialComplex& k = f.space();
    phi.check(k);
    DeformationReport r;
    r.critical_values = phi.critical_values();
    r.samples = sample_points(r.critical_values);
    SectionCache cache(f);

    std::vector<CellSet> u;
    for (auto& s : r.samples)
        u.push_back(sublevel(k, phi, s));
    for (std::size_t i = 1; i < u.size(); ++i) {
        // sublevels are constant on (c_{i-1}, c_i]
        CellSet just_below = sublevel(k, phi, (r.samples[i - 1] + r.samples[i]) / 2);
        if (just_below != u[i])
            r.exhaustive = false;
        if (!std::includes(u[i].begin(), u[i].end(), u[i - 1].begin(), u[i - 1].end()))
            r.exhaustive = false;
    }
    if (!u.empty() && u.back() != k.all_cells())
        r.exhaustive = false;

    for (std::size_t i = 0; i < r.samples.size(); ++i) {
        CellSet z = z_set(k, phi, r.samples[i]);
        if (z.empty())
            continue;
        r.z_sets.push_back({r.samples[i], z});
        for (std::size_t j = i; j < r.samples.size(); ++j)
            for (auto cell : z) {
                const SectionComplex& near = cache.sections(set_intersection(k.star(cell), u[j]));
                bool acyclic = exactalg::is_acyclic(exactalg::fiber(stalk_comparison(f, cell, near)));
                r.stalk_conditions.push_back({r.samples[i], r.samples[j], cell, acyclic});
            }
    }

    const CellSet all = k.all_cells();
    for (std::size_t i = 0; i < r.samples.size(); ++i)
        r.sections.push_back(detail::describe(r.samples[i], u[i], cache.cohomology(u[i])));
    r.whole = detail::describe(r.samples.back(), all, cache.cohomology(all));

    auto check = [&](const CellSet& big, const CellSet& small, bool whole, const Rational& t, const Rational& s) {
        ChainMap res = restriction(cache.sections(big), cache.sections(small));
        auto v = exactalg::is_quasi_iso(res, cache.cohomology(big), cache.cohomology(small));
        r.restrictions.push_back({whole, t, s, v.holds, v.failing_degree});
    };
    for (std::size_t j = 0; j < r.samples.size(); ++j) {
        check(all, u[j], true, r.samples[j], r.samples[j]);
        for (std::size_t i = 0; i < j; ++i)
            check(u[j], u[i], false, r.samples[j], r.samples[i]);
    }
    return r;
}

/// The sublevel family as a tame tower of section complexes: strata values
/// are Γ(U_s) at a representative s, structure maps are restrictions.
inline towers::TameTower<towers::ComplexTraits> section_tower(const CellSheaf& f, const PLFunction& phi)
{
    const SimplicialComplex& k = f.space();
    auto cv = phi.critical_values();
    std::vector<Rational> reps;
    if (cv.empty())
        reps.push_back(Rational(0));
    else {
        reps.push_back(cv.front() - 1);
        for (std::size_t i = 0; i < cv.size(); ++i) {
            reps.push_back(cv[i]);
            reps.push_back(i + 1 < cv.size() ? Rational((cv[i] + cv[i + 1]) / 2) : Rational(cv[i] + 1));
        }
    }
    SectionCache cache(f);
    std::vector<ChainComplex> pieces;
    std::vector<ChainMap> down;
    std::vector<CellSet> u;
    for (auto& s : reps) {
        u.push_back(sublevel(k, phi, s));
        pieces.push_back(cache.sections(u.back()).complex);
    }
    for (std::size_t i = 0; i + 1 < u.size(); ++i)
        down.push_back(restriction(cache.sections(u[i + 1]), cache.sections(u[i])));
    return towers::TameTower<towers::ComplexTraits>(cv, pieces, down);
}

} // namespace microlocal::cellsheaf
