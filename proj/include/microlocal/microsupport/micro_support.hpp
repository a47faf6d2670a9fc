#pragma once

#include "microlocal/cellsheaf/deformation.hpp"
#include "microlocal/microsupport/fan.hpp"

namespace microlocal::microsupport {

using cellsheaf::CellSheaf;
using cellsheaf::OpenCellSet;
using cellsheaf::PLFunction;
using exactalg::ChainComplex;

struct MicroSupportOptions
{
    bool include_boundary = false; // half-space verdicts at boundary cells, non-normative
};

/// Cells of the star of σ meeting the open half-space {ξ·(x − b) < 0}.
inline OpenCellSet negative_side(const SimplicialComplex& k, const ConormalFan& fan, const Vector& xi)
{
    CellSet out;
    for (auto t : k.star(fan.cell)) {
        for (auto v : k.cell(t)) {
            Vector d = k.coordinates(v);
            for (std::size_t i = 0; i < d.size(); ++i)
                d[i] -= fan.base[i];
            if (dot(xi, d) < 0) {
                out.push_back(t);
                break;
            }
        }
    }
    return OpenCellSet(k, out);
}

/// fib(F_σ → Γ(star σ ∩ {ξ < 0})): acyclic iff (σ, ξ) passes the vanishing test.
inline ChainComplex morse_datum(const CellSheaf& f, const Covector& xi, const MicroSupportOptions& opt = {})
{
    const SimplicialComplex& k = f.space();
    ConormalFan fan = conormal_fan(k, xi.cell, opt.include_boundary);
    if (!fan.is_conormal(k, xi.direction))
        throw PreconditionError("covector " + vector_label(xi.direction) + " is not conormal to " + k.label(xi.cell));
    return cellsheaf::stalk_of_supported_sections(f, xi.cell, negative_side(k, fan, xi.direction));
}

struct ConeVerdict
{
    bool morse_nonacyclic = false; // the representative's own test
    bool in_ss = false;            // after closing up
};

struct CellMicroSupport
{
    std::size_t cell;
    bool boundary = false;
    bool zero_section = false; // σ ∈ supp F
    ConormalFan fan;
    std::vector<ConeVerdict> verdicts; // aligned with fan.cones
};

struct MicroSupportReport
{
    bool include_boundary = false;
    std::vector<CellMicroSupport> cells;
    std::size_t closure_additions = 0;

    const CellMicroSupport* find(std::size_t cell) const
    {
        for (auto& c : cells)
            if (c.cell == cell)
                return &c;
        return nullptr;
    }

    bool contains(const Covector& xi) const
    {
        const CellMicroSupport* c = find(xi.cell);
        if (!c)
            throw PreconditionError("cell " + std::to_string(xi.cell) + " is not covered by the report");
        return c->verdicts[c->fan.locate(xi.direction)].in_ss;
    }

    /// Cells whose zero covector lies in the micro-support.
    CellSet zero_section_cells() const
    {
        CellSet out;
        for (auto& c : cells)
            if (contains({c.cell, Vector(c.fan.base.size(), Rational(0))}))
                out.push_back(c.cell);
        return out;
    }
};

/// SS(F) over every interior cell (and boundary cells when asked): each fan
/// cone tested at its representative, then closed under the face order of
/// cones and of cells.
inline MicroSupportReport micro_support(const CellSheaf& f, const MicroSupportOptions& opt = {})
{
    const SimplicialComplex& k = f.space();
    if (!k.is_pseudomanifold())
        throw PreconditionError("micro-support needs a manifold-flagged complex");
    MicroSupportReport r;
    r.include_boundary = opt.include_boundary;
    CellSet supp = f.support();
    for (std::size_t s = 0; s < k.size(); ++s) {
        if (k.is_boundary(s) && !opt.include_boundary)
            continue;
        CellMicroSupport c{s, k.is_boundary(s), cellsheaf::set_contains(supp, s), conormal_fan(k, s, true), {}};
        for (auto& cone : c.fan.cones) {
            bool hot = !exactalg::is_acyclic(cellsheaf::stalk_of_supported_sections(
                f, s, negative_side(k, c.fan, cone.representative)));
            c.verdicts.push_back({hot, hot});
        }
        r.cells.push_back(std::move(c));
    }
    // a cone is in SS when it lies in the closure of an SS cone at the same
    // cell or at a coface; cells run from high to low dimension so one pass
    // over cofaces suffices
    std::vector<std::size_t> order(r.cells.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return k.dim(r.cells[a].cell) > k.dim(r.cells[b].cell); });
    for (auto i : order) {
        CellMicroSupport& c = r.cells[i];
        for (std::size_t a = 0; a < c.fan.cones.size(); ++a) {
            if (c.verdicts[a].in_ss)
                continue;
            bool forced = false;
            for (std::size_t b = 0; b < c.fan.cones.size() && !forced; ++b)
                forced = c.verdicts[b].in_ss && c.fan.in_closure(a, b);
            for (auto t : k.cofaces(c.cell)) {
                const CellMicroSupport* up = r.find(t);
                if (forced || !up)
                    continue;
                const Vector& rep = c.fan.cones[a].representative;
                if (!up->fan.is_conormal(k, rep))
                    continue;
                std::size_t at = up->fan.locate(rep);
                for (std::size_t b = 0; b < up->fan.cones.size() && !forced; ++b)
                    forced = up->verdicts[b].in_ss && up->fan.in_closure(at, b);
            }
            if (forced) {
                c.verdicts[a].in_ss = true;
                ++r.closure_additions;
            }
        }
    }
    return r;
}

/// The pointwise Morse test at (σ, dφ) and the direct stalk test are the same
/// computation in different clothes and must agree exactly; SS membership may
/// exceed them only through closure (e.g. zero covectors over the closure of
/// the stalk support).
struct CrosscheckEntry
{
    Rational s;
    std::size_t cell;
    Vector covector;
    bool morse_fails;
    bool in_ss;
    bool direct_fails; // Γ_{X∖U_s} has a nonzero stalk at the cell
    bool agree() const { return morse_fails == direct_fails && (!direct_fails || in_ss); }
    bool closure_only() const { return in_ss && !morse_fails; }
};

struct CrosscheckSkip
{
    Rational s;
    std::size_t cell;
    std::string reason;
};

struct CrosscheckReport
{
    std::vector<CrosscheckEntry> entries;
    std::vector<CrosscheckSkip> skipped;

    std::size_t disagreements() const
    {
        std::size_t n = 0;
        for (auto& e : entries)
            n += e.agree() ? 0 : 1;
        return n;
    }
};

/// dφ on the star of a cell, when φ is affine there.
inline std::optional<Vector> local_differential(const SimplicialComplex& k, const PLFunction& phi, std::size_t cell)
{
    std::set<std::size_t> verts;
    for (auto t : k.star(cell))
        for (auto v : k.cell(t))
            verts.insert(v);
    const std::size_t n = k.ambient_dimension();
    Matrix a(Ring::rationals(), verts.size(), n + 1), b(Ring::rationals(), verts.size(), 1);
    std::size_t r = 0;
    for (auto v : verts) {
        for (std::size_t j = 0; j < n; ++j)
            a.set(r, j, k.coordinates(v)[j]);
        a.set(r, n, 1);
        b.set(r, 0, phi(v));
        ++r;
    }
    auto x = exactalg::solve(a, b);
    if (!x)
        return std::nullopt;
    Vector xi;
    for (std::size_t j = 0; j < n; ++j)
        xi.push_back((*x)(j, 0));
    return xi;
}

/// Compares SS membership of (σ, dφ) with the direct stalk test of the
/// deformation condition at the diagonal pair, for σ in each level set.
inline CrosscheckReport crosscheck_noncharacteristic(const CellSheaf& f, const PLFunction& phi,
                                                     const MicroSupportOptions& opt = {})
{
    const SimplicialComplex& k = f.space();
    phi.check(k);
    MicroSupportReport ss = micro_support(f, opt);
    CrosscheckReport r;
    for (auto& s : phi.critical_values()) {
        OpenCellSet below(k, cellsheaf::sublevel(k, phi, s));
        for (auto cell : cellsheaf::z_set(k, phi, s)) {
            if (!ss.find(cell)) {
                r.skipped.push_back({s, cell, "boundary cell"});
                continue;
            }
            auto xi = local_differential(k, phi, cell);
            if (!xi) {
                r.skipped.push_back({s, cell, "function is not affine on the star"});
                continue;
            }
            bool direct = !exactalg::is_acyclic(cellsheaf::stalk_of_supported_sections(f, cell, below));
            const CellMicroSupport& c = *ss.find(cell);
            std::size_t cone = c.fan.locate(*xi);
            r.entries.push_back({s, cell, *xi, c.verdicts[cone].morse_nonacyclic, c.verdicts[cone].in_ss, direct});
        }
    }
    return r;
}

} // namespace microlocal::microsupport
