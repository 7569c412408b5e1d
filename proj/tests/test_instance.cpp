#include "oracle.hpp"

#include <gtest/gtest.h>

using namespace prefq;

namespace {

const Schema& car() { static const Schema s = parse_schema("make:str, year:rat"); return s; }

Tuple car_tuple(const char* make, long year) { return {Value::text(make), Value::rational(year)}; }

} // namespace

TEST(Csv, LoadsCarRelation)
{
    Instance r = load_csv_text("make,year\nVW,2002\nVW,1997\nKia,1997\n", car(), "r1");
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0], car_tuple("VW", 2002));
    EXPECT_EQ(r[2], car_tuple("Kia", 1997));
    EXPECT_EQ(r.name(), "r1");
}

TEST(Csv, RoundTrip)
{
    Instance r("r", car(), {car_tuple("VW", 2002), {Value::text("Kia"), Value::rational(Rational(3995, 2))}});
    Instance back = load_csv_text(serialize_csv(r), car());
    EXPECT_EQ(back.tuples(), r.tuples());
}

TEST(Csv, ValueParseErrorLocatesCell)
{
    try
    {
        load_csv_text("make,year\nVW,2002\nVW,abc\n", car());
        FAIL() << "expected ValueParseError";
    }
    catch (const ValueParseError& e)
    {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.column(), 2u);
    }
}

TEST(Csv, HeaderMustMatchSchema)
{
    EXPECT_THROW(load_csv_text("year,make\n2002,VW\n", car()), HeaderMismatch);
    EXPECT_THROW(load_csv_text("", car()), HeaderMismatch);
}

TEST(Csv, DuplicateRowsRejected)
{
    try
    {
        load_csv_text("make,year\nVW,2002\nVW,2002\n", car());
        FAIL() << "expected DuplicateTuple";
    }
    catch (const DuplicateTuple& e)
    {
        EXPECT_EQ(e.row(), 2u);
    }
}

TEST(Csv, WrongArity)
{
    EXPECT_THROW(load_csv_text("make,year\nVW\n", car()), ValueParseError);
}

TEST(Instance, TypeChecksTuples)
{
    EXPECT_THROW(Instance("r", car(), {{Value::rational(1), Value::rational(2)}}), TypeError);
    EXPECT_THROW(Instance("r", car(), {car_tuple("VW", 1), car_tuple("VW", 1)}), DuplicateTuple);
}

TEST(Tuples, ParsesLiterals)
{
    EXPECT_EQ(parse_tuple("(VW, 2002)", car()), car_tuple("VW", 2002));
    EXPECT_EQ(parse_tuple("('VW', 2002)", car()), car_tuple("VW", 2002));
    EXPECT_THROW(parse_tuple("(VW)", car()), Error);
    EXPECT_THROW(parse_tuple("(VW, x)", car()), Error);
}

TEST(Updates, InsertAppends)
{
    Instance r1("r1", car(), {car_tuple("VW", 2002), car_tuple("VW", 1997), car_tuple("Kia", 1997)});
    Instance r2 = apply_update(r1, {car_tuple("Kia", 2000)}, {});
    ASSERT_EQ(r2.size(), 4u);
    EXPECT_EQ(r2[3], car_tuple("Kia", 2000));
}

TEST(Updates, DeleteKeepsOrder)
{
    Instance r1("r1", car(), {car_tuple("VW", 2002), car_tuple("VW", 1997), car_tuple("Kia", 1997)});
    Instance r2 = apply_update(r1, {}, {car_tuple("VW", 1997)});
    EXPECT_EQ(r2.tuples(), (std::vector<Tuple>{car_tuple("VW", 2002), car_tuple("Kia", 1997)}));
}

TEST(Updates, OverlapRejected)
{
    Instance r1("r1", car(), {car_tuple("VW", 2002)});
    EXPECT_THROW(apply_update(r1, {car_tuple("VW", 2002)}, {car_tuple("VW", 2002)}), OverlapError);
}

TEST(Updates, SetOperationsMatchStdSets)
{
    oracle::Rng rng(5);
    for (int i = 0; i < 100; ++i)
    {
        std::vector<Tuple> a, b;
        for (int k = 0; k < 6; ++k)
        {
            Tuple t{Value::text(oracle::coin(rng) ? "VW" : "Kia"), Value::rational(oracle::uniform(rng, 0, 3))};
            auto& dst = oracle::coin(rng) ? a : b;
            if (std::find(dst.begin(), dst.end(), t) == dst.end())
                dst.push_back(t);
        }
        Instance ia("a", car(), a), ib("b", car(), b);
        std::set<Tuple> sa(a.begin(), a.end()), sb(b.begin(), b.end()), u, d;
        std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(u, u.end()));
        std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(d, d.end()));
        EXPECT_EQ(oracle::as_set(set_union(ia, ib)), u);
        EXPECT_EQ(oracle::as_set(set_difference(ia, ib)), d);
    }
}

TEST(Csv, RandomRoundTrips)
{
    oracle::Rng rng(6);
    const Schema s = parse_schema("name:str, q:rat, tag:str");
    const char* names[] = {"VW", "Kia", "a b", "x-y", "O'Neil"};
    for (int i = 0; i < 100; ++i)
    {
        std::vector<Tuple> ts;
        for (int k = oracle::uniform(rng, 0, 8); k > 0; --k)
        {
            Tuple t{Value::text(names[oracle::uniform(rng, 0, 4)]),
                    Value::rational(Rational(oracle::uniform(rng, -50, 50), oracle::uniform(rng, 1, 7))),
                    Value::text(oracle::coin(rng) ? "t" : "u")};
            if (std::find(ts.begin(), ts.end(), t) == ts.end())
                ts.push_back(t);
        }
        Instance r("r", s, ts);
        Instance back = load_csv_text(serialize_csv(r), s);
        EXPECT_EQ(back.tuples(), r.tuples());
        EXPECT_EQ(serialize_csv(back), serialize_csv(r));
    }
}

TEST(Updates, DisjointBatchesCompose)
{
    oracle::Rng rng(7);
    const Schema s = parse_schema("v:str");
    std::vector<Tuple> pool;
    for (char c = 'a'; c <= 'l'; ++c)
        pool.push_back({Value::text(std::string(1, c))});
    for (int i = 0; i < 100; ++i)
    {
        std::shuffle(pool.begin(), pool.end(), rng);
        // Base, two insert batches and two delete batches, all disjoint.
        std::vector<Tuple> base(pool.begin(), pool.begin() + 6);
        std::vector<Tuple> i1(pool.begin() + 6, pool.begin() + 8), i2(pool.begin() + 8, pool.begin() + 10);
        std::vector<Tuple> d1(base.begin(), base.begin() + 2), d2(base.begin() + 2, base.begin() + 3);
        Instance r("r", s, base);
        Instance stepwise = apply_update(apply_update(r, i1, d1), i2, d2);
        std::vector<Tuple> ins = i1, del = d1;
        ins.insert(ins.end(), i2.begin(), i2.end());
        del.insert(del.end(), d2.begin(), d2.end());
        EXPECT_EQ(stepwise.tuples(), apply_update(r, ins, del).tuples());
    }
}
