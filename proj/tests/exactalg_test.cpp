#include <gtest/gtest.h>

#include "support/exactness.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace microlocal;
using namespace microlocal::exactalg;

namespace {

Matrix ints(std::vector<std::vector<int>> rows, Ring ring = Ring::integers())
{
    std::vector<std::vector<Rational>> r;
    for (auto& row : rows) {
        r.emplace_back();
        for (int x : row)
            r.back().push_back(Rational(x));
    }
    return Matrix::from_rows(ring, r);
}

const std::vector<Ring>& all_rings()
{
    static const std::vector<Ring> rings{Ring::rationals(), Ring::prime_field(2), Ring::prime_field(5),
                                         Ring::integers()};
    return rings;
}

bool divisibility_chain(const SmithForm& s)
{
    auto d = s.divisors();
    for (std::size_t i = 0; i + 1 < d.size(); ++i)
        if (!s.diagonal.ring().divides(d[i], d[i + 1]))
            return false;
    return true;
}

bool is_diagonal(const Matrix& m)
{
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != 0)
                return false;
    return true;
}

} // namespace

TEST(Ring, ParsesNamesAndRejectsComposite)
{
    EXPECT_EQ(Ring::parse("q").name(), "q");
    EXPECT_EQ(Ring::parse("z").name(), "z");
    EXPECT_EQ(Ring::parse("fp:7").characteristic(), 7);
    EXPECT_THROW(Ring::parse("fp:9"), InvalidInput);
    EXPECT_THROW(Ring::parse("r"), InvalidInput);
}

TEST(Ring, RationalTextIsExact)
{
    EXPECT_EQ(to_string(parse_rational("6/4")), "3/2");
    EXPECT_EQ(to_string(parse_rational("-2")), "-2/1");
    EXPECT_THROW(parse_rational("0.5"), InvalidInput);
    EXPECT_THROW(parse_rational("1/0"), InvalidInput);
    EXPECT_EQ(Ring::prime_field(5).reduce(parse_rational("1/2")), Rational(3));
    EXPECT_THROW(Ring::integers().reduce(parse_rational("1/2")), InvalidInput);
}

TEST(Smith, DiagonalTwoThree)
{
    Matrix m = ints({{2, 0}, {0, 3}});
    SmithForm s = smith_normal_form(m);
    EXPECT_EQ(s.left * m * s.right, s.diagonal);
    EXPECT_EQ(s.diagonal, ints({{1, 0}, {0, 6}}));
    EXPECT_EQ(s.left * s.left_inverse, Matrix::identity(m.ring(), 2));
    EXPECT_EQ(s.right * s.right_inverse, Matrix::identity(m.ring(), 2));
}

TEST(Smith, ZeroAndIdentity)
{
    Matrix z(Ring::integers(), 2, 3);
    SmithForm s = smith_normal_form(z);
    EXPECT_TRUE(s.diagonal.is_zero());
    EXPECT_EQ(s.left, Matrix::identity(z.ring(), 2));
    EXPECT_EQ(s.right, Matrix::identity(z.ring(), 3));
    Matrix id = Matrix::identity(Ring::integers(), 3);
    EXPECT_EQ(smith_normal_form(id).diagonal, id);
}

TEST(Smith, FrozenDivisorsMatchDeterminantalOracle)
{
    // Expected divisors computed once by the determinantal-divisor oracle.
    Matrix m = ints({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
    auto oracle_divs = oracle::elementary_divisors(oracle::to_grid(m));
    ASSERT_EQ(oracle_divs, (std::vector<Integer>{2, 6, 12}));
    EXPECT_EQ(smith_normal_form(m).divisors(), (std::vector<Rational>{2, 6, 12}));
}

TEST(SmithProperty, RandomIntegerMatrices)
{
    gen::Rng rng(11);
    Ring z = Ring::integers();
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t r = std::size_t(gen::uniform(rng, 1, 8)), c = std::size_t(gen::uniform(rng, 1, 8));
        Matrix m = gen::random_matrix(rng, z, r, c, -9, 9);
        SmithForm s = smith_normal_form(m);
        ASSERT_EQ(s.left * m * s.right, s.diagonal) << m.str();
        ASSERT_TRUE(is_diagonal(s.diagonal));
        ASSERT_TRUE(divisibility_chain(s));
        ASSERT_EQ(s.left * s.left_inverse, Matrix::identity(z, r));
        ASSERT_EQ(s.right * s.right_inverse, Matrix::identity(z, c));
        if (r * c <= 30) {
            auto want = oracle::elementary_divisors(oracle::to_grid(m));
            auto got = s.divisors();
            ASSERT_EQ(want.size(), got.size());
            for (std::size_t i = 0; i < want.size(); ++i)
                ASSERT_EQ(Rational(want[i]), got[i]);
        }
    }
}

TEST(SmithProperty, FieldRanksMatchElimination)
{
    gen::Rng rng(12);
    for (const Ring& ring : all_rings()) {
        for (int trial = 0; trial < 40; ++trial) {
            Matrix m = gen::random_matrix(rng, ring, std::size_t(gen::uniform(rng, 0, 6)),
                                          std::size_t(gen::uniform(rng, 0, 6)));
            SmithForm s = smith_normal_form(m);
            ASSERT_EQ(s.left * m * s.right, s.diagonal);
            ASSERT_EQ(s.rank, oracle::rank(m));
        }
    }
}

TEST(Module, KernelImageAndIsomorphism)
{
    Ring z = Ring::integers();
    FgModule z2 = FgModule::from_invariants(z, {Rational(2)}, 0);
    FgModule zz(z, 1);
    EXPECT_EQ(z2.describe(), "z/2");
    ModuleMap proj{zz, z2, ints({{1}})};
    proj.validate();
    EXPECT_TRUE(is_surjective(proj));
    EXPECT_FALSE(is_injective(proj));
    ModuleMap twice{zz, zz, ints({{2}})};
    EXPECT_TRUE(is_injective(twice));
    EXPECT_FALSE(is_surjective(twice));
    ModuleMap bad{z2, zz, ints({{1}})};
    EXPECT_THROW(bad.validate(), InvalidInput);
    // z/6 ≅ z/2 ⊕ z/3
    FgModule z6 = FgModule::from_invariants(z, {Rational(6)}, 0);
    FgModule z23(ints({{2, 0}, {0, 3}}));
    EXPECT_TRUE(isomorphic(z6, z23));
}

TEST(Complex, RejectsNonComplex)
{
    Ring q = Ring::rationals();
    EXPECT_THROW(ChainComplex(q, 0, {1, 1, 1}, {ints({{1}}, q), ints({{1}}, q)}), InvalidInput);
    EXPECT_THROW(ChainComplex(q, 0, {1, 2}, {ints({{1}}, q)}), InvalidInput);
}

TEST(Cohomology, AcyclicIdentityCone)
{
    Ring q = Ring::rationals();
    ChainComplex c(q, 0, {1, 1}, {ints({{1}}, q)});
    EXPECT_TRUE(cohomology(c, 0).is_zero());
    EXPECT_TRUE(cohomology(c, 1).is_zero());
}

TEST(Cohomology, TimesTwoOnIntegers)
{
    ChainComplex c(Ring::integers(), 0, {1, 1}, {ints({{2}})});
    EXPECT_TRUE(cohomology(c, 0).is_zero());
    auto h1 = cohomology(c, 1);
    EXPECT_EQ(h1.value.free_rank(), 0u);
    EXPECT_EQ(h1.value.torsion(), (std::vector<Rational>{2}));
    EXPECT_EQ(oracle::cohomology(c, 1), (oracle::Invariants{0, {2}}));
}

TEST(Cohomology, ZeroDifferentialsFarApart)
{
    Ring q = Ring::rationals();
    ChainComplex c = ChainComplex::from_map(q, {{-1, 2}, {4, 3}});
    EXPECT_EQ(cohomology(c, -1).rank(), 2u);
    EXPECT_EQ(cohomology(c, 4).rank(), 3u);
    EXPECT_TRUE(cohomology(c, 0).is_zero());
}

TEST(Cohomology, RepresentativesAreCyclesAndCoordinatesInvert)
{
    gen::Rng rng(21);
    for (const Ring& ring : all_rings())
        for (int trial = 0; trial < 25; ++trial) {
            ChainComplex c = gen::random_complex(rng, ring);
            for (int j = c.lowest(); !c.empty_range() && j <= c.highest(); ++j) {
                auto h = cohomology(c, j);
                ASSERT_EQ(oracle::invariants_of(h.value), oracle::cohomology(c, j));
                if (h.generators() == 0)
                    continue;
                ASSERT_TRUE((c.differential(j) * h.representatives).is_zero());
                Matrix id = h.reduce_coordinates(h.coordinates * h.representatives);
                ASSERT_EQ(id, Matrix::identity(ring, h.generators()));
                // boundaries have zero coordinates
                Matrix b = h.reduce_coordinates(h.coordinates * c.differential(j - 1));
                ASSERT_TRUE(b.is_zero());
            }
        }
}

TEST(Fiber, IdentityIsAcyclic)
{
    gen::Rng rng(31);
    ChainComplex c = gen::random_complex(rng, Ring::integers());
    EXPECT_TRUE(is_acyclic(fiber(ChainMap::identity(c))));
}

TEST(Fiber, ZeroMapOnLine)
{
    // fib(0: k → k) = k in degree 0 ⊕ k in degree 1 with zero differential.
    Ring q = Ring::rationals();
    ChainComplex k = ChainComplex::concentrated(q, 0, 1);
    ChainComplex f = fiber(ChainMap::zero(k, k));
    EXPECT_EQ(cohomology(f, 0).rank(), 1u);
    EXPECT_EQ(cohomology(f, 1).rank(), 1u);
    EXPECT_TRUE(cohomology(f, -1).is_zero());
}

TEST(Fiber, TimesPOnIntegers)
{
    Ring z = Ring::integers();
    ChainComplex k = ChainComplex::concentrated(z, 0, 1);
    ChainComplex f = fiber(ChainMap(k, k, {{0, ints({{3}})}}));
    EXPECT_TRUE(cohomology(f, -1).is_zero());
    EXPECT_TRUE(cohomology(f, 0).is_zero());
    EXPECT_EQ(cohomology(f, 1).value.torsion(), (std::vector<Rational>{3}));
}


TEST(FiberProperty, LongExactSequence)
{
    gen::Rng rng(41);
    for (const Ring& ring : all_rings())
        for (int trial = 0; trial < 25; ++trial) {
            auto a = gen::random_elementary(rng, ring);
            auto b = gen::random_elementary(rng, ring);
            ChainMap f = gen::random_map(rng, a, b);
            oracle::expect_les_exact(f);
        }
}

TEST(QuasiIso, Examples)
{
    Ring q = Ring::rationals();
    ChainComplex k = ChainComplex::concentrated(q, 0, 1);
    EXPECT_TRUE(is_quasi_iso(ChainMap::identity(k)).holds);
    ChainComplex zero(q);
    ChainComplex cone(q, 0, {1, 1}, {ints({{1}}, q)});
    EXPECT_TRUE(is_quasi_iso(ChainMap::zero(zero, cone)).holds);
    auto v = is_quasi_iso(ChainMap::zero(zero, k));
    EXPECT_FALSE(v.holds);
    EXPECT_EQ(v.failing_degree, 0);
}

TEST(QuasiIsoProperty, AgreesWithAcyclicFiber)
{
    gen::Rng rng(51);
    int positives = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Ring& ring = all_rings()[std::size_t(trial) % 4];
        auto a = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 4});
        ChainMap f = [&] {
            if (trial % 3 == 0) {
                // a → a ⊕ acyclic, a quasi-iso by construction (unless torsion weights differ)
                auto extra = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 3, .acyclic = true});
                ChainComplex src = a.complex();
                ChainComplex tgt = direct_sum(src, extra.complex());
                std::map<int, Matrix> comps;
                for (int k : src.support()) {
                    Matrix m(ring, tgt.dim(k), src.dim(k));
                    m.paste(Matrix::identity(ring, src.dim(k)), 0, 0);
                    comps.emplace(k, m);
                }
                return ChainMap(src, tgt, comps);
            }
            auto b = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 4});
            return gen::random_map(rng, a, b);
        }();
        bool qi = is_quasi_iso(f).holds;
        positives += qi;
        ASSERT_EQ(qi, is_acyclic(fiber(f))) << "trial " << trial;
    }
    EXPECT_GT(positives, 10);
}

TEST(Induced, Examples)
{
    Ring z = Ring::integers();
    ChainComplex k = ChainComplex::concentrated(z, 0, 1);
    EXPECT_EQ(induced_map_on_cohomology(ChainMap::identity(k), 0), Matrix::identity(z, 1));
    EXPECT_EQ(induced_map_on_cohomology(ChainMap(k, k, {{0, ints({{2}})}}), 0), ints({{2}}));
    ChainComplex cone(z, 0, {1, 1}, {ints({{1}})});
    Matrix m = induced_map_on_cohomology(ChainMap::zero(cone, k), 0);
    EXPECT_EQ(m.rows(), 1u);
    EXPECT_EQ(m.cols(), 0u);
}

TEST(InducedProperty, Functorial)
{
    gen::Rng rng(61);
    for (const Ring& ring : all_rings())
        for (int trial = 0; trial < 20; ++trial) {
            auto a = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 4});
            auto b = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 4});
            auto c = gen::random_elementary(rng, ring, {.lo = -2, .hi = 2, .max_rank = 4});
            ChainMap f = gen::random_map(rng, a, b);
            ChainMap g = gen::random_map(rng, b, c);
            ChainMap gf = compose(g, f);
            for (int j = -2; j <= 3; ++j) {
                auto ha = cohomology(a.complex(), j), hb = cohomology(b.complex(), j), hc = cohomology(c.complex(), j);
                Matrix lhs = induced_map(gf, j, ha, hc);
                Matrix rhs = hc.reduce_coordinates(induced_map(g, j, hb, hc) * induced_map(f, j, ha, hb));
                ASSERT_EQ(lhs, rhs) << "degree " << j;
            }
        }
}
