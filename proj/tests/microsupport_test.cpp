#include <gtest/gtest.h>

#include "microlocal/microsupport.hpp"
#include "support/sheaf_generators.hpp"

using namespace microlocal;
using namespace microlocal::exactalg;
using namespace microlocal::cellsheaf;
using namespace microlocal::microsupport;

namespace {

ChainComplex unit_stalk(const Ring& ring) { return ChainComplex::concentrated(ring, 0, 1); }

std::size_t cell_of(const SimplicialComplex& k, Cell c) { return *k.find(std::move(c)); }

Vector vec(std::initializer_list<int> xs) { return gen::point(xs); }

std::vector<Vector> directions(const ConormalFan& fan)
{
    std::vector<Vector> out;
    for (auto& c : fan.cones)
        out.push_back(c.representative);
    return out;
}

bool hot(const CellSheaf& f, std::size_t cell, const Vector& xi)
{
    return !is_acyclic(morse_datum(f, {cell, xi}, {.include_boundary = true}));
}

/// A random point of the cone's relative interior.
Vector interior_point(gen::Rng& rng, const ConormalFan& fan, const Cone& cone)
{
    if (cone.span.empty())
        return cone.representative;
    Vector delta(cone.representative.size(), Rational(0));
    for (auto& b : cone.span)
        delta = axpy(delta, Rational(gen::uniform(rng, -5, 5)), b);
    Rational eps(gen::uniform(rng, 1, 4), gen::uniform(rng, 1, 3));
    while (true) {
        Vector p = axpy(cone.representative, eps, delta);
        if (fan.sign_vector(p) == cone.signs)
            return p;
        eps /= 2;
    }
}

/// Sheaf spaces whose cells all have full-dimensional stars, so that the
/// embedding contributes no conormal directions.
gen::Space full_dimensional_space(gen::Rng& rng)
{
    switch (gen::uniform(rng, 0, 2)) {
    case 0: return gen::line(gen::uniform(rng, -3, -1), gen::uniform(rng, 1, 3));
    case 1: return gen::triangle();
    default: return gen::square();
    }
}

const std::vector<Ring>& all_rings()
{
    static const std::vector<Ring> rings{Ring::rationals(), Ring::prime_field(3), Ring::integers()};
    return rings;
}

} // namespace

TEST(ConormalFanTest, VertexOfTheLine)
{
    auto k = gen::line(-1, 1);
    ConormalFan fan = conormal_fan(*k, cell_of(*k, {1}));
    ASSERT_EQ(fan.cones.size(), 3u);
    EXPECT_EQ(fan.cones[0].dimension, 0);
    EXPECT_EQ(directions(fan), (std::vector<Vector>{vec({0}), vec({1}), vec({-1})}));
    EXPECT_EQ(fan.locate(gen::point({7})), 1u);
    EXPECT_EQ(fan.locate(Vector{Rational(-1, 3)}), 2u);
}

TEST(ConormalFanTest, EdgeInThePlaneHasANormalLine)
{
    auto k = gen::square();
    std::size_t diagonal = cell_of(*k, {0, 4});
    ConormalFan fan = conormal_fan(*k, diagonal);
    ASSERT_EQ(fan.cones.size(), 3u);
    EXPECT_EQ(fan.cones[0].dimension, 0);
    EXPECT_EQ(fan.cones[1].dimension, 1);
    EXPECT_EQ(fan.cones[2].dimension, 1);
    for (std::size_t i = 1; i < 3; ++i) {
        const Vector& r = fan.cones[i].representative;
        EXPECT_EQ(abs(r[0]), 1);
        EXPECT_EQ(r[0], -r[1]);
    }
    EXPECT_FALSE(fan.is_conormal(*k, vec({1, 1})));
}

TEST(ConormalFanTest, TopCellHasOnlyTheZeroCone)
{
    auto k = gen::square();
    ConormalFan fan = conormal_fan(*k, cell_of(*k, {0, 1, 4}));
    ASSERT_EQ(fan.cones.size(), 1u);
    EXPECT_EQ(fan.cones[0].dimension, 0);
    EXPECT_EQ(fan.cones[0].representative, vec({0, 0}));
}

TEST(ConormalFanTest, InteriorVertexOfTheSquare)
{
    // neighbours lie on three lines through (1,1)
    auto k = gen::square();
    ConormalFan fan = conormal_fan(*k, cell_of(*k, {4}));
    ASSERT_EQ(fan.cones.size(), 13u);
    int rays = 0, sectors = 0;
    for (auto& c : fan.cones) {
        rays += c.dimension == 1;
        sectors += c.dimension == 2;
    }
    EXPECT_EQ(rays, 6);
    EXPECT_EQ(sectors, 6);
    EXPECT_THROW(conormal_fan(*k, cell_of(*k, {0})), PreconditionError);
    EXPECT_NO_THROW(conormal_fan(*k, cell_of(*k, {0}), true));
}

TEST(ConormalFanProperty, ConesPartitionTheConormalSpace)
{
    gen::Rng rng(501);
    for (int trial = 0; trial < 40; ++trial) {
        auto k = gen::random_space(rng);
        std::size_t cell = std::size_t(gen::uniform(rng, 0, int(k->size()) - 1));
        ConormalFan fan = conormal_fan(*k, cell, true);
        std::set<std::vector<int>> signs;
        for (std::size_t i = 0; i < fan.cones.size(); ++i) {
            const Cone& c = fan.cones[i];
            EXPECT_TRUE(signs.insert(c.signs).second) << "repeated cone";
            EXPECT_EQ(fan.locate(c.representative), i);
            EXPECT_TRUE(fan.is_conormal(*k, c.representative));
            EXPECT_EQ(int(c.span.size()), c.dimension);
        }
        EXPECT_EQ(int(fan.conormal_basis.size()), int(k->ambient_dimension()) - k->dim(cell));
        for (int probe = 0; probe < 20; ++probe) {
            Vector xi(k->ambient_dimension(), Rational(0));
            for (auto& b : fan.conormal_basis)
                xi = axpy(xi, Rational(gen::uniform(rng, -4, 4), gen::uniform(rng, 1, 3)), b);
            std::size_t at = fan.locate(xi);
            EXPECT_EQ(fan.locate(axpy(Vector(xi.size(), Rational(0)), Rational(gen::uniform(rng, 1, 9)), xi)), at);
        }
    }
}

TEST(MorseDatumTest, LineExamples)
{
    Ring q = Ring::rationals();
    auto k = gen::line(-1, 1);
    std::size_t v = cell_of(*k, {1});
    CellSheaf c = CellSheaf::constant(k, unit_stalk(q));
    EXPECT_TRUE(is_acyclic(morse_datum(c, {v, vec({1})})));
    EXPECT_TRUE(is_acyclic(morse_datum(c, {v, vec({-1})})));
    EXPECT_FALSE(is_acyclic(morse_datum(c, {v, vec({0})})));

    // k on the open half-line (0, ∞)
    CellSheaf open = CellSheaf::indicator(k, {cell_of(*k, {1, 2}), cell_of(*k, {2})}, unit_stalk(q));
    CohomologyTable h(morse_datum(open, {v, vec({-1})}));
    EXPECT_EQ(h.at(1).value.free_rank(), 1u);
    EXPECT_TRUE(h.at(0).is_zero());
    EXPECT_TRUE(h.at(-1).is_zero());
    EXPECT_TRUE(is_acyclic(morse_datum(open, {v, vec({1})})));

    EXPECT_THROW(morse_datum(c, {cell_of(*k, {0}), vec({1})}), PreconditionError);
    EXPECT_THROW(morse_datum(c, {cell_of(*k, {0, 1}), vec({1})}), PreconditionError);
}

TEST(MicroSupportTest, ConstantSheafIsTheZeroSection)
{
    auto k = gen::line(-2, 2);
    CellSheaf c = CellSheaf::constant(k, unit_stalk(Ring::integers()));
    MicroSupportReport r = micro_support(c);
    EXPECT_EQ(r.cells.size(), k->size() - 2);
    for (auto& cell : r.cells) {
        EXPECT_TRUE(cell.zero_section);
        for (std::size_t i = 0; i < cell.fan.cones.size(); ++i)
            EXPECT_EQ(cell.verdicts[i].in_ss, cell.fan.cones[i].dimension == 0) << k->label(cell.cell);
    }
}

TEST(MicroSupportTest, HalfLines)
{
    Ring q = Ring::rationals();
    auto k = gen::line(-2, 2);
    std::size_t v = cell_of(*k, {2});
    CellSet right{cell_of(*k, {2, 3}), cell_of(*k, {3}), cell_of(*k, {3, 4}), cell_of(*k, {4})};
    CellSheaf open = CellSheaf::indicator(k, right, unit_stalk(q));
    MicroSupportReport r = micro_support(open);
    EXPECT_TRUE(r.contains({v, vec({-1})}));
    EXPECT_TRUE(r.contains({v, vec({0})}));
    EXPECT_FALSE(r.contains({v, vec({1})}));
    EXPECT_EQ(r.zero_section_cells(), (CellSet{v, cell_of(*k, {3}), cell_of(*k, {2, 3}), cell_of(*k, {3, 4})}));

    CellSheaf closed = CellSheaf::indicator(k, set_union(right, {v}), unit_stalk(q));
    MicroSupportReport s = micro_support(closed);
    EXPECT_FALSE(s.contains({v, vec({-1})}));
    EXPECT_TRUE(s.contains({v, vec({0})}));
    EXPECT_TRUE(s.contains({v, vec({1})}));
    // away from the vertex both are local systems
    for (auto* sheaf : {&r, &s}) {
        EXPECT_FALSE(sheaf->contains({cell_of(*k, {3}), vec({1})}));
        EXPECT_TRUE(sheaf->contains({cell_of(*k, {2, 3}), vec({0})}));
        EXPECT_FALSE(sheaf->contains({cell_of(*k, {1, 2}), vec({0})}));
    }
}

TEST(MicroSupportTest, RequiresAManifold)
{
    auto k = std::make_shared<SimplicialComplex>(
        std::vector{gen::point({0, 0}), gen::point({1, 0}), gen::point({0, 1}), gen::point({-1, 0})},
        std::vector<Cell>{{0, 1}, {0, 2}, {0, 3}});
    EXPECT_THROW(micro_support(CellSheaf::constant(k, unit_stalk(Ring::rationals()))), PreconditionError);
}

TEST(CrosscheckTest, CircleSegmentAndSkyscraper)
{
    Ring q = Ring::rationals();
    auto circle = gen::circle();
    CellSheaf c = CellSheaf::constant(circle, unit_stalk(q));
    CrosscheckReport r = crosscheck_noncharacteristic(c, gen::height(*circle));
    EXPECT_EQ(r.disagreements(), 0u);
    EXPECT_TRUE(r.skipped.empty());
    CellSet flagged;
    for (auto& e : r.entries)
        if (e.in_ss)
            flagged.push_back(e.cell);
    EXPECT_EQ(flagged, (CellSet{cell_of(*circle, {0}), cell_of(*circle, {4})}));

    auto seg = gen::line(-2, 2);
    CrosscheckReport s = crosscheck_noncharacteristic(CellSheaf::constant(seg, unit_stalk(q)), gen::height(*seg));
    EXPECT_EQ(s.disagreements(), 0u);
    EXPECT_EQ(s.entries.size(), 3u);
    EXPECT_EQ(s.skipped.size(), 2u);
    for (auto& e : s.entries)
        EXPECT_FALSE(e.in_ss);

    CellSheaf sky = CellSheaf::skyscraper(seg, cell_of(*seg, {2}), unit_stalk(q));
    CrosscheckReport t = crosscheck_noncharacteristic(sky, gen::height(*seg));
    EXPECT_EQ(t.disagreements(), 0u);
    for (auto& e : t.entries) {
        EXPECT_EQ(e.in_ss, e.cell == cell_of(*seg, {2}));
        if (e.in_ss)
            EXPECT_EQ(e.covector, vec({1}));
    }
}

TEST(CrosscheckTest, SkipsNonAffineStars)
{
    auto k = gen::line(-1, 1);
    PLFunction bent{{Rational(1), Rational(0), Rational(1)}};
    CrosscheckReport r = crosscheck_noncharacteristic(CellSheaf::constant(k, unit_stalk(Ring::rationals())), bent);
    ASSERT_EQ(r.skipped.size(), 3u);
    EXPECT_EQ(r.skipped[0].reason, "function is not affine on the star");
}

TEST(MicroSupportProperty, ConicAndPiecewiseConstant)
{
    gen::Rng rng(502);
    for (int trial = 0; trial < 12; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % all_rings().size()];
        auto k = gen::small_space(rng);
        CellSheaf f = gen::random_sheaf(rng, k, ring);
        MicroSupportReport r = micro_support(f);
        for (auto& c : r.cells)
            for (std::size_t i = 0; i < c.fan.cones.size(); ++i) {
                const Cone& cone = c.fan.cones[i];
                bool verdict = c.verdicts[i].morse_nonacyclic;
                for (int m = 0; m < 10; ++m) {
                    Rational lambda(gen::uniform(rng, 1, 20), gen::uniform(rng, 1, 7));
                    EXPECT_EQ(hot(f, c.cell, axpy(Vector(cone.representative.size(), Rational(0)), lambda,
                                                  cone.representative)),
                              verdict);
                }
                for (int m = 0; m < 3; ++m)
                    EXPECT_EQ(hot(f, c.cell, interior_point(rng, c.fan, cone)), verdict)
                        << "trial " << trial << " cell " << k->label(c.cell);
            }
    }
}

TEST(MicroSupportProperty, ZeroSectionIsTheSupport)
{
    gen::Rng rng(503);
    for (int trial = 0; trial < 30; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % all_rings().size()];
        auto k = gen::random_space(rng);
        CellSheaf f = gen::random_sheaf(rng, k, ring, {.max_summands = 2});
        MicroSupportReport r = micro_support(f);
        CellSet covered;
        for (auto& c : r.cells)
            covered.push_back(c.cell);
        EXPECT_EQ(r.zero_section_cells(), set_intersection(f.support(), covered)) << "trial " << trial;
    }
}

TEST(MicroSupportProperty, LocalSystemsHaveZeroSectionOnly)
{
    gen::Rng rng(504);
    for (int trial = 0; trial < 20; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % all_rings().size()];
        auto k = full_dimensional_space(rng);
        ChainComplex c = gen::random_complex(rng, ring, {.lo = -1, .hi = 1, .max_rank = 2});
        if (c.empty_range())
            c = unit_stalk(ring);
        CellSheaf f = gen::conjugate_sheaf(rng, CellSheaf::constant(k, c));
        MicroSupportReport r = micro_support(f);
        for (auto& cell : r.cells)
            for (std::size_t i = 0; i < cell.fan.cones.size(); ++i) {
                bool zero = cell.fan.cones[i].signs == std::vector<int>(cell.fan.offsets.size(), 0);
                EXPECT_EQ(cell.verdicts[i].in_ss, zero && !is_acyclic(c)) << "trial " << trial;
            }
    }
}

namespace {

/// A random morphism A → B of sums of indicator sheaves built from
/// restrictions k_Y → k_Z (Z closed in Y) and extensions k_V → k_Y (V open in Y).
struct IndicatorMorphism
{
    CellSheaf source;
    CellSheaf target;
    std::vector<ChainMap> components;
};

IndicatorMorphism random_morphism(gen::Rng& rng, const gen::Space& k, const Ring& ring)
{
    CellSheaf a = CellSheaf::constant(k, ChainComplex(ring));
    CellSheaf b = a;
    std::vector<std::vector<std::pair<bool, bool>>> pieces; // per summand, per cell: in source, in target
    std::vector<ChainComplex> stalks;
    std::vector<Rational> scalars;
    int n = gen::uniform(rng, 1, 2);
    for (int i = 0; i < n; ++i) {
        CellSet y = gen::random_locally_closed(rng, *k);
        bool restricting = gen::uniform(rng, 0, 1) == 0;
        // restriction needs Z closed in Y, extension needs V open in Y
        CellSet z = set_intersection(y, gen::random_closed(rng, *k));
        CellSet v = set_intersection(y, gen::random_open(rng, *k));
        CellSet src = restricting ? y : v, tgt = restricting ? z : y;
        ChainComplex c = gen::random_complex(rng, ring, {.lo = -1, .hi = 1, .max_rank = 2});
        if (c.empty_range())
            c = unit_stalk(ring);
        a = direct_sum(a, CellSheaf::indicator(k, src, c));
        b = direct_sum(b, CellSheaf::indicator(k, tgt, c));
        std::vector<std::pair<bool, bool>> in;
        for (std::size_t s = 0; s < k->size(); ++s)
            in.push_back({set_contains(src, s), set_contains(tgt, s)});
        pieces.push_back(in);
        stalks.push_back(c);
        scalars.push_back(ring.reduce(Rational(gen::uniform(rng, -2, 2))));
    }
    std::vector<ChainMap> comps;
    for (std::size_t s = 0; s < k->size(); ++s) {
        std::map<int, Matrix> m;
        auto [lo, hi] = joint_range(a.stalk(s), b.stalk(s));
        for (int d = lo; d <= hi; ++d) {
            Matrix block(ring, b.stalk(s).dim(d), a.stalk(s).dim(d));
            std::size_t row = 0, col = 0;
            for (std::size_t i = 0; i < pieces.size(); ++i) {
                std::size_t r = pieces[i][s].second ? stalks[i].dim(d) : 0;
                std::size_t c = pieces[i][s].first ? stalks[i].dim(d) : 0;
                if (r && c)
                    block.paste(Matrix::identity(ring, r).scaled(scalars[i]), row, col);
                row += r;
                col += c;
            }
            m.emplace(d, block);
        }
        comps.emplace_back(a.stalk(s), b.stalk(s), m);
    }
    return {a, b, comps};
}

/// fib(u) with fib^n = A^n ⊕ B^{n-1} at every cell and block-diagonal
/// generizations; sits in 0 → B[-1] → fib(u) → A → 0.
CellSheaf fiber_sheaf(const IndicatorMorphism& u)
{
    const SimplicialComplex& k = u.source.space();
    std::vector<ChainComplex> stalks;
    for (auto& c : u.components)
        stalks.push_back(fiber(c));
    std::map<CellSheaf::Key, ChainMap> g;
    for (std::size_t t = 0; t < k.size(); ++t)
        for (auto [s, sign] : k.facets(t)) {
            std::map<int, Matrix> m;
            auto [lo, hi] = joint_range(stalks[s], stalks[t]);
            for (int d = lo; d <= hi; ++d)
                m.emplace(d, Matrix::direct_sum(u.source.map(s, t).component(d), u.target.map(s, t).component(d - 1)));
            g.emplace(CellSheaf::Key{s, t}, ChainMap(stalks[s], stalks[t], m));
        }
    return CellSheaf(u.source.space_ptr(), u.source.ring(), stalks, g);
}

} // namespace

TEST(MicroSupportProperty, ExtensionsStayInsideTheOuterTerms)
{
    gen::Rng rng(505);
    int nontrivial = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % all_rings().size()];
        auto k = gen::small_space(rng);
        IndicatorMorphism u = random_morphism(rng, k, ring);
        CellSheaf mid = fiber_sheaf(u);
        MicroSupportReport sm = micro_support(mid), sa = micro_support(u.source), sb = micro_support(u.target);
        for (auto& c : sm.cells)
            for (std::size_t i = 0; i < c.fan.cones.size(); ++i) {
                if (!c.verdicts[i].in_ss)
                    continue;
                ++nontrivial;
                Covector xi{c.cell, c.fan.cones[i].representative};
                EXPECT_TRUE(sa.contains(xi) || sb.contains(xi))
                    << "trial " << trial << " at " << k->label(c.cell) << " " << vector_label(xi.direction);
            }
    }
    EXPECT_GT(nontrivial, 0);
}

TEST(MicroSupportTest, ClosureAddsTheZeroCovectorOverTheSupport)
{
    // stalk zero at the middle vertex, k on both edges: the vertex is in supp F
    // but its own Morse test at ξ = 0 sees nothing
    auto k = gen::line(-1, 1);
    std::size_t v = cell_of(*k, {1});
    CellSheaf f = CellSheaf::indicator(k, {cell_of(*k, {0, 1})}, unit_stalk(Ring::rationals()));
    f = direct_sum(f, CellSheaf::indicator(k, {cell_of(*k, {1, 2})}, unit_stalk(Ring::rationals())));
    MicroSupportReport r = micro_support(f);
    const CellMicroSupport& c = *r.find(v);
    std::size_t zero = c.fan.locate(vec({0}));
    EXPECT_FALSE(c.verdicts[zero].morse_nonacyclic);
    EXPECT_TRUE(c.verdicts[zero].in_ss);
    EXPECT_TRUE(r.contains({v, vec({1})}));
    EXPECT_TRUE(r.contains({v, vec({-1})}));
    EXPECT_EQ(r.closure_additions, 1u);

    PLFunction flat{{Rational(0), Rational(0), Rational(0)}};
    CrosscheckReport x = crosscheck_noncharacteristic(f, flat);
    EXPECT_EQ(x.disagreements(), 0u);
    for (auto& e : x.entries)
        EXPECT_EQ(e.closure_only(), e.cell == v) << k->label(e.cell);
}

TEST(MicroSupportProperty, CrosscheckAgreesOnRandomSheaves)
{
    gen::Rng rng(506);
    std::size_t tested = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % all_rings().size()];
        auto k = gen::small_space(rng);
        CellSheaf f = gen::random_sheaf(rng, k, ring);
        PLFunction phi = gen::random_function(rng, *k);
        CrosscheckReport r = crosscheck_noncharacteristic(f, phi);
        EXPECT_EQ(r.disagreements(), 0u) << "trial " << trial;
        tested += r.entries.size();
    }
    EXPECT_GT(tested, 30u);
}
