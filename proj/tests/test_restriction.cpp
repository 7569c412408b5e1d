#include "suites.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace prefq;

namespace {

const Schema& car() { static const Schema s = parse_schema("make:str, year:rat"); return s; }

Tuple car_tuple(const char* make, long year) { return {Value::text(make), Value::rational(year)}; }

Instance r1() { return Instance("r1", car(), {car_tuple("VW", 2002), car_tuple("VW", 1997), car_tuple("Kia", 1997)}); }

PreferenceRelation c1() { return {"c1", parse_formula("x.make = y.make AND x.year > y.year", car())}; }

Tuple t(const char* v) { return {Value::text(v)}; }

using Matrix = oracle::Matrix;

Matrix minus_transpose(const Matrix& a, const Matrix& b)
{
    Matrix m = a;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            m[i][j] = a[i][j] && !b[j][i];
    return m;
}

// Walks of length >= 1 in m.
Matrix walks(const Matrix& m) { return oracle::closure(m); }

std::set<std::pair<std::size_t, std::size_t>> conflicts_by_walks(const Matrix& p, const Matrix& p0, int level)
{
    const std::size_t n = p.size();
    const Matrix w = walks(minus_transpose(p, p0));
    const Matrix w0 = walks(minus_transpose(p0, p));
    std::set<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
        {
            bool hit = false;
            if (level == 0)
                hit = p0[i][j] && p[j][i];
            else if (level == 1)
                hit = p0[i][j] && w[j][i];
            else
                hit = w[j][i] && w0[i][j];
            if (hit)
                out.emplace(i, j);
        }
    return out;
}

UtilityExpr year_utility()
{
    UtilityExpr u;
    u.linear.push_back({"year", 1});
    return u;
}

UtilityExpr vw_utility()
{
    UtilityExpr u;
    u.indicators.push_back({"make", Value::text("VW"), 1});
    return u;
}

} // namespace

TEST(Restriction, CarPairs)
{
    Instance r = r1();
    FinitePreference f = restrict(c1(), r);
    EXPECT_EQ(f.edge_count(), 1u);
    EXPECT_TRUE(f.has(0, 1));
}

TEST(Restriction, EdgeOutsideInstanceDisappears)
{
    auto p = oracle::finite_relation("p", {{"a", "b"}});
    EXPECT_EQ(restrict(p, oracle::letters("r", {"a", "c"})).edge_count(), 0u);
}

TEST(Restriction, FiniteClosure)
{
    auto p = oracle::finite_relation("p", {{"a", "b"}});
    auto p0 = oracle::finite_relation("p0", {{"b", "c"}});
    Instance abc = oracle::letters("r", {"a", "b", "c"});
    auto u = finite_tc(compose_edgewise(restrict(p0, abc), restrict(p, abc), Composition::Union));
    EXPECT_EQ(u.edge_count(), 3u);
    EXPECT_TRUE(u.has(t("a"), t("c")));
}

TEST(Restriction, FourDisjunctRelationIsNotSpo)
{
    const Schema s = parse_schema("v:str");
    PreferenceRelation p("t", parse_formula("x.v = 'a' AND y.v <> 'a' OR x.v = 'b' AND y.v <> 'b' OR "
                                            "x.v <> 'c' AND y.v = 'c' OR x.v <> 'd' AND y.v = 'd'",
                                            s));
    EXPECT_FALSE(finite_check(restrict(p, oracle::letters("r", {"a", "b", "c", "d"})), OrderProperty::SPO));
}

TEST(RevisionVariants, StrictContainments)
{
    auto p = oracle::finite_relation("p", {{"a", "b"}});
    auto p0 = oracle::finite_relation("p0", {{"b", "c"}});
    Instance r = oracle::letters("r", {"a", "c"});
    auto v = revision_variants(p, p0, Composition::Union, r);
    EXPECT_EQ(v.v2.edge_count(), 1u);
    EXPECT_TRUE(v.v2.has(t("a"), t("c")));
    EXPECT_EQ(v.v3.edge_count(), 0u);
    EXPECT_TRUE(v.v4 == v.v3);
    EXPECT_EQ(winnow_finite(v.v2).tuples(), std::vector<Tuple>{t("a")});
    EXPECT_EQ(winnow_finite(v.v3).tuples(), (std::vector<Tuple>{t("a"), t("c")}));
}

TEST(RevisionVariants, ChainOnRandomInstances)
{
    oracle::Rng rng(61);
    const Composition ops[] = {Composition::Union, Composition::Prioritized, Composition::Pareto};
    for (int i = 0; i < 60; ++i)
    {
        auto regions = oracle::random_regions(rng);
        auto p = oracle::random_shaped("p", regions, suites::coin_shape(rng), rng);
        auto p0 = oracle::random_shaped("p0", regions, suites::coin_shape(rng), rng);
        Instance r = suites::random_instance(rng, regions, 6);
        auto v = revision_variants(p, p0, ops[i % 3], r);
        auto m1 = oracle::matrix_of(v.v1, r.tuples());
        // v3 from first principles: close the composed relation on r.
        auto m3 = oracle::closure(oracle::matrix_of(compose(p0, p, ops[i % 3]), r.tuples()));
        for (std::size_t a = 0; a < r.size(); ++a)
            for (std::size_t b = 0; b < r.size(); ++b)
            {
                EXPECT_EQ(v.v2.has(a, b), static_cast<bool>(m1[a][b]));
                EXPECT_EQ(v.v3.has(a, b), static_cast<bool>(m3[a][b]));
                EXPECT_EQ(v.v4.has(a, b), v.v3.has(a, b));
                if (v.v3.has(a, b))
                    EXPECT_TRUE(v.v2.has(a, b));
            }
    }
}

TEST(FiniteConflicts, MatchWalkOracle)
{
    oracle::Rng rng(62);
    for (int i = 0; i < 150; ++i)
    {
        const int n = oracle::uniform(rng, 2, 7);
        std::vector<std::string> vs;
        for (int k = 0; k < n; ++k)
            vs.push_back(std::string(1, static_cast<char>('a' + k)));
        Instance r = oracle::letters("r", vs);
        auto p = oracle::finite_relation("p", oracle::random_edges(rng, n, 0.25));
        auto p0 = oracle::finite_relation("p0", oracle::random_edges(rng, n, 0.25));
        auto mp = oracle::matrix_of(p, r.tuples()), mp0 = oracle::matrix_of(p0, r.tuples());
        FinitePreference f = restrict(p, r), f0 = restrict(p0, r);
        for (int level = 0; level < 3; ++level)
        {
            std::set<std::pair<std::size_t, std::size_t>> got;
            for (const auto& [a, b] : finite_conflicts(f, f0, level))
                got.emplace(*r.index_of(a), *r.index_of(b));
            EXPECT_EQ(got, conflicts_by_walks(mp, mp0, level)) << "level " << level;
        }
    }
}

TEST(FiniteConflicts, RestrictionCanHideConflicts)
{
    auto p = oracle::finite_relation("p", {{"a", "b"}, {"b", "c"}, {"a", "c"}});
    auto p0 = oracle::finite_relation("p0", {{"c", "a"}});
    Instance r = oracle::letters("r", {"a", "c"});
    EXPECT_TRUE(finite_compatible(restrict(p, r), restrict(p0, r), 1));
    EXPECT_FALSE(is_compatible(p, p0, 1));
}

TEST(Utilities, YearOrder)
{
    Instance r = r1();
    FinitePreference f = utility_pref(r, year_utility());
    EXPECT_EQ(f.edge_count(), 2u);
    EXPECT_TRUE(f.has(0, 1));
    EXPECT_TRUE(f.has(0, 2));
}

TEST(Utilities, CombinedInducesUnion)
{
    Instance r = r1();
    FinitePreference fv = utility_pref(r, vw_utility());
    EXPECT_EQ(fv.edge_count(), 2u);
    EXPECT_TRUE(fv.has(0, 2) && fv.has(1, 2));
    UtilityExpr c = combine_utilities(r, year_utility(), vw_utility(), 1, 1, 0);
    FinitePreference fc = utility_pref(r, c);
    EXPECT_EQ(fc.edge_count(), 3u);
    EXPECT_TRUE(fc.has(0, 1) && fc.has(0, 2) && fc.has(1, 2));
}

TEST(Utilities, IncompatibleRejected)
{
    Instance r = r1();
    UtilityExpr older;
    older.linear.push_back({"year", -1});
    EXPECT_THROW(combine_utilities(r, year_utility(), older, 1, 1, 0), NotZeroCompatible);
    EXPECT_THROW(combine_utilities(r, year_utility(), vw_utility(), 0, 1, 0), Error);
}

TEST(Utilities, HiddenRefinement)
{
    Instance r = r1();
    FinitePreference h = hidden_refinement(r, year_utility(), vw_utility());
    EXPECT_EQ(h.edge_count(), 1u);
    EXPECT_TRUE(h.has(1, 2));
}

TEST(Utilities, RandomPairs)
{
    auto res = suites::utilities(63, 40);
    EXPECT_EQ(res.violations, 0) << res.first_violation;
}

TEST(StoredPreference, WinnowOverCars)
{
    std::istringstream in("make.l,year.l,make.r,year.r\nVW,2002,VW,1997\n");
    Instance edges = load_stored_csv(in, car());
    FinitePreference f = stored_pref(edges, r1());
    EXPECT_EQ(winnow_finite(f).tuples(), (std::vector<Tuple>{car_tuple("VW", 2002), car_tuple("Kia", 1997)}));
    EXPECT_EQ(stored_pref(edges, car()).size(), 2u);
}

TEST(StoredPreference, SchemaChecked)
{
    Instance bad("e", parse_schema("a:str"), {});
    EXPECT_THROW(stored_pref(bad, car()), SchemaMismatch);
}

TEST(Restriction, CommutesWithComposition)
{
    oracle::Rng rng(64);
    for (int i = 0; i < 80; ++i)
    {
        auto regions = oracle::random_regions(rng);
        auto p = oracle::random_shaped("p", regions, suites::coin_shape(rng), rng);
        auto p0 = oracle::random_shaped("p0", regions, suites::coin_shape(rng), rng);
        Instance r = suites::random_instance(rng, regions, 8);
        for (Composition op : {Composition::Union, Composition::Prioritized, Composition::Pareto})
            EXPECT_TRUE(restrict(compose(p0, p, op), r) == compose_edgewise(restrict(p0, r), restrict(p, r), op));
    }
}

TEST(Restriction, SpoTransfersDownward)
{
    oracle::Rng rng(65);
    for (int i = 0; i < 60; ++i)
    {
        auto regions = oracle::random_regions(rng);
        auto p = oracle::random_shaped("p", regions, suites::coin_shape(rng), rng);
        auto p0 = oracle::random_shaped("p0", regions, suites::coin_shape(rng), rng);
        Instance r = suites::random_instance(rng, regions, 7);
        auto v = revision_variants(p, p0, Composition::Union, r);
        if (check_property(v.v1, OrderProperty::SPO))
            EXPECT_TRUE(finite_check(v.v2, OrderProperty::SPO));
        if (finite_check(v.v2, OrderProperty::SPO))
            EXPECT_TRUE(finite_check(v.v3, OrderProperty::SPO));
        for (int level = 0; level < 3; ++level)
            if (is_compatible(p, p0, level))
                EXPECT_TRUE(finite_compatible(restrict(p, r), restrict(p0, r), level));
    }
}

TEST(Restriction, SpoTransferCounterexamples)
{
    // A reflexive pair vanishes when its element is outside r.
    auto loop = oracle::finite_relation("p", {{"a", "a"}});
    auto none = oracle::finite_relation("p0", {});
    auto v = revision_variants(loop, none, Composition::Union, oracle::letters("r", {"b"}));
    EXPECT_FALSE(check_property(v.v1, OrderProperty::SPO));
    EXPECT_TRUE(finite_check(v.v2, OrderProperty::SPO));

    // Closing the union first creates (b,b); restricting first does not.
    auto w = revision_variants(oracle::finite_relation("p", {{"b", "a"}}), oracle::finite_relation("p0", {{"a", "b"}}),
                               Composition::Union, oracle::letters("r", {"b"}));
    EXPECT_FALSE(finite_check(w.v2, OrderProperty::SPO));
    EXPECT_TRUE(w.v2.has(t("b"), t("b")));
    EXPECT_TRUE(finite_check(w.v3, OrderProperty::SPO));
}
