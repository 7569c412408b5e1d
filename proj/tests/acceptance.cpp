// Acceptance suite: one PASS/FAIL line per primary criterion.
#include "suites.hpp"

#include <chrono>
#include <iostream>
#include <sstream>

using namespace prefq;

namespace {

struct Check
{
    bool ok = true;
    std::ostringstream notes;

    void expect(bool cond, const std::string& what)
    {
        if (!cond)
        {
            ok = false;
            notes << "\n    failed: " << what;
        }
    }
};

const Schema& car_schema()
{
    static const Schema s = parse_schema("make:str, year:rat");
    return s;
}

PreferenceRelation pref(const std::string& name, const std::string& dsl, const Schema& s)
{
    return {name, parse_formula(dsl, s)};
}

Instance cars()
{
    return Instance("r1", car_schema(),
                    {{Value::text("VW"), Value::rational(2002)},
                     {Value::text("VW"), Value::rational(1997)},
                     {Value::text("Kia"), Value::rational(1997)}});
}

const char* kC1 = "x.make = y.make AND x.year > y.year";
const char* kC2 = "x.make = 'VW' AND y.make <> 'VW' AND x.year = y.year";
const char* kC3 = "x.make = 'VW' AND x.year = 1999 AND y.make = 'Kia' AND y.year = 1999";
const char* kCStar = "x.make = y.make AND x.year > y.year OR x.make = 'VW' AND y.make <> 'VW' AND x.year >= y.year";
const char* kC4 = "x.make = y.make AND x.year > y.year OR "
                  "x.make = 'VW' AND x.year >= 1999 AND y.make = 'Kia' AND y.year <= 1999";

Check g1()
{
    Check c;
    Instance r = cars();
    Instance w = winnow(pref("c1", kC1, car_schema()), r);
    c.expect(w.tuples() == std::vector<Tuple>{r[0], r[2]}, "winnow(C1, r1) = {t1, t3}, got " + serialize_csv(w));
    return c;
}

Check g2()
{
    Check c;
    auto c1 = pref("c1", kC1, car_schema());
    auto c2 = pref("c2", kC2, car_schema());
    auto u = compose(c1, c2, Composition::Union);
    auto t = transitive_closure(u);
    auto printed = pref("cstar", kCStar, car_schema());
    c.expect(implies(t.formula(), printed.formula()) && implies(printed.formula(), t.formula()),
             "TC(C1 u C2) equivalent to printed C*, got " + t.formula().str());
    c.expect(check_property(t, OrderProperty::Irreflexive), "C* irreflexive");
    c.expect(contains(t, u) && !contains(u, t), "C* properly contains C1 u C2");
    Instance r = cars();
    c.expect(eval_ground(t.formula(), r[0], r[2]), "t1 >C* t3");
    c.expect(eval_ground(t.formula(), r[1], r[2]), "t2 >C* t3");
    c.expect(winnow(t, r).tuples() == std::vector<Tuple>{r[0]}, "winnow(C*, r1) = {t1}");
    return c;
}

Check g3()
{
    Check c;
    auto c1 = pref("c1", kC1, car_schema());
    auto c3 = pref("c3", kC3, car_schema());
    auto u = compose(c1, c3, Composition::Union);
    auto t = transitive_closure(u);
    auto printed = pref("c4", kC4, car_schema());
    c.expect(equivalent(t, printed), "TC(C1 u C3) equivalent to printed C4, got " + t.formula().str());
    c.expect(contains(t, u) && !contains(u, t), "C4 properly contains C1 u C3");
    c.expect(check_property(printed, OrderProperty::SPO), "C4 is an SPO");
    Instance r = cars();
    c.expect(eval_ground(printed.formula(), r[0], r[2]), "t1 >C4 t3");
    c.expect(check_property(c3, OrderProperty::IO), "C3 is an IO");
    c.expect(!check_property(c3, OrderProperty::WO), "C3 is not a WO");
    return c;
}

bool conflict_at(const PreferenceRelation& p, const PreferenceRelation& p0, int level, const std::string& t1,
                 const std::string& t2, Level2Reading reading = Level2Reading::DualChain)
{
    auto rep = conflict_formula(p, p0, level, reading);
    return eval_ground(rep.witness_formula, {Value::text(t1)}, {Value::text(t2)});
}

Check g4()
{
    Check c;
    using E = std::vector<std::pair<std::string, std::string>>;
    auto p = oracle::finite_relation("p", E{{"b", "a"}});
    auto p0 = oracle::finite_relation("p0", E{{"a", "b"}});
    c.expect(conflict_at(p, p0, 0, "a", "b"), "(a,b) is a 0-conflict");
    c.expect(!conflict_at(p, p0, 1, "a", "b"), "(a,b) is not a 1-conflict");

    auto p_chain = oracle::finite_relation("p", E{{"b", "a"}, {"b", "c"}, {"c", "a"}});
    c.expect(conflict_at(p_chain, p0, 1, "a", "b"), "adding (b,c),(c,a) to > makes (a,b) a 1-conflict");
    c.expect(!is_compatible(p_chain, p0, 1), "hence not 1-compatible");

    for (const E& extra : {E{{"c", "b"}}, E{{"a", "c"}}})
    {
        E e0{{"a", "b"}};
        e0.insert(e0.end(), extra.begin(), extra.end());
        auto q0 = oracle::finite_relation("p0", e0);
        c.expect(!conflict_at(p_chain, q0, 1, "a", "b"), "adding (" + extra[0].first + "," + extra[0].second +
                                                             ") to >0 removes the 1-conflict");
    }

    auto d0 = oracle::finite_relation("p0", E{{"a", "b"}, {"a", "d"}, {"d", "b"}});
    c.expect(conflict_at(p_chain, d0, 2, "a", "b"), "adding (a,d),(d,b) to >0 gives a 2-conflict");
    c.expect(conflict_at(p_chain, d0, 1, "a", "b"), "which is still a 1-conflict");
    return c;
}

Check g5()
{
    Check c;
    const Schema sq = parse_schema("q:rat");
    auto hole = pref("hole", "x.q > y.q AND x.q <> 0 AND y.q <> 0", sq);
    c.expect(check_property(hole, OrderProperty::IO) && !check_property(hole, OrderProperty::WO),
             "hole-order is an IO and not a WO");
    auto p11 = apply_rule(RuleId::P11, hole);
    auto printed = pref("t", "x.q > y.q AND x.q <> 0 AND y.q <> 0 OR x.q <> 0 AND y.q = 0", sq);
    c.expect(equivalent(p11, printed), "P11(hole) equivalent to the printed order, got " + p11.formula().str());
    c.expect(check_property(p11, OrderProperty::TotalOrder), "P11(hole) is a total order");

    auto e1 = eval_expression(RuleExpression::E1, hole);
    c.expect(e1.stages.size() == 1, "E1 on hole-order stops after one stage");
    if (!e1.stages.empty())
    {
        const auto& s = e1.stages.front();
        c.expect(!s.new_facts && equivalent(s.relation, hole), "stage 1 derives nothing new");
        c.expect(!s.is_wo, "stage 1 is not a WO");
    }

    const Schema sd = parse_schema("v:str");
    auto ac_bd = oracle::finite_relation("p", {{"a", "c"}, {"b", "d"}});
    auto derived = compose(apply_rule(RuleId::P11, ac_bd), apply_rule(RuleId::P12, ac_bd), Composition::Union);
    auto printed_t = pref("t", "x.v = 'a' AND y.v <> 'a' OR x.v = 'b' AND y.v <> 'b' OR "
                               "x.v <> 'c' AND y.v = 'c' OR x.v <> 'd' AND y.v = 'd'",
                          sd);
    c.expect(equivalent(derived, printed_t), "P11 u P12 on {(a,c),(b,d)} matches, got " + derived.formula().str());
    auto e1b = eval_expression(RuleExpression::E1, ac_bd);
    auto printed_wo = pref("t",
                           "x.v = 'a' AND y.v <> 'a' AND y.v <> 'b' OR x.v = 'b' AND y.v <> 'b' AND y.v <> 'a' OR "
                           "x.v <> 'c' AND x.v <> 'd' AND y.v = 'c' OR x.v <> 'c' AND x.v <> 'd' AND y.v = 'd'",
                           sd);
    c.expect(!e1b.stages.empty() && equivalent(e1b.last(), printed_wo),
             "E1 on {(a,c),(b,d)} yields the printed WO" +
                 (e1b.stages.empty() ? std::string() : ", got " + e1b.last().formula().str()));
    c.expect(!e1b.stages.empty() && e1b.stages.size() == 1 && e1b.stages.front().is_wo,
             "the first stage is a WO and the trace ends");
    return c;
}

Check g6()
{
    Check c;
    auto p = oracle::finite_relation("p", {{"a", "b"}});
    auto p0 = oracle::finite_relation("p0", {{"b", "c"}});
    Instance r = oracle::letters("r", {"a", "c"});
    auto v = revision_variants(p, p0, Composition::Union, r);
    const Tuple a{Value::text("a")}, b{Value::text("b")}, cc{Value::text("c")};
    c.expect(eval_ground(v.v1.formula(), a, b) && eval_ground(v.v1.formula(), b, cc) &&
                 eval_ground(v.v1.formula(), a, cc),
             ">1 contains (a,b),(b,c),(a,c)");
    c.expect(v.v2.edge_count() == 1 && v.v2.has(0, 1), ">2 = {(a,c)}");
    c.expect(v.v3.edge_count() == 0, ">3 is empty");
    c.expect(v.v4 == v.v3, ">4 = >3");
    c.expect(winnow_finite(v.v2).tuples() == std::vector<Tuple>{a}, "winnow under >2 = {a}");
    c.expect(winnow_finite(v.v3).tuples() == std::vector<Tuple>{a, cc}, "winnow under >3 = {a,c}");
    return c;
}

// Both relations are SPOs but not IOs and 0-compatible, yet their union
// closes into a cycle.
Check cycle_control()
{
    Check c;
    auto p = oracle::finite_relation("p", {{"A", "B"}, {"C", "D"}});
    auto p0 = oracle::finite_relation("p0", {{"B", "C"}, {"D", "A"}});
    c.expect(check_property(p, OrderProperty::SPO) && check_property(p0, OrderProperty::SPO), "both SPOs");
    c.expect(!check_property(p, OrderProperty::IO) && !check_property(p0, OrderProperty::IO), "neither is an IO");
    c.expect(is_compatible(p, p0, 0), "0-compatible");
    c.expect(!check_property(transitive_closure(compose(p0, p, Composition::Union)), OrderProperty::Irreflexive),
             "TC of the union is not irreflexive");
    return c;
}

Check union_wo_control()
{
    Check c;
    const Schema sd = parse_schema("v:str");
    auto p = pref("p", "x.v = 'a' AND y.v <> 'a'", sd);
    auto p0 = pref("p0", "x.v = 'b' AND y.v <> 'b'", sd);
    c.expect(check_property(p, OrderProperty::WO) && check_property(p0, OrderProperty::WO), "both WOs");
    c.expect(!is_compatible(p, p0, 0), "not 0-compatible");
    c.expect(!check_property(compose(p0, p, Composition::Union), OrderProperty::WO), "union is not a WO");
    return c;
}

struct Line
{
    std::string id;
    std::string title;
    bool ok;
    std::string notes;
    double seconds;
};

int failures = 0;

template <class F>
void run(const std::string& id, const std::string& title, F body)
{
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    std::string notes;
    try
    {
        Check c = body();
        ok = c.ok;
        notes = c.notes.str();
    }
    catch (const std::exception& e)
    {
        notes = std::string("\n    exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > 60)
    {
        ok = false;
        notes += "\n    exceeded 60 s";
    }
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << id << " " << title << " (" << std::fixed << std::setprecision(2) << secs
              << " s)" << notes << std::endl;
}

void suite(Check& c, const std::string& name, const suites::Result& r, int min_cases)
{
    c.notes << "\n    " << name << ": " << r.cases << " cases, " << r.violations << " violations";
    if (r.violations)
        c.notes << " (first: " << r.first_violation << ")";
    if (!r.ok(min_cases))
        c.ok = false;
}

} // namespace

int main()
{
    run("G1", "winnow(C1, r1) = {t1, t3}", g1);
    run("G2", "TC(C1 u C2) = C*, winnow = {t1}", g2);
    run("G3", "TC(C1 u C3) = C4, C3 IO not WO", g3);
    run("G4", "conflict ladder", g4);
    run("G5", "rule-based WO extension examples", g5);
    run("G6", "restricted revision variants", g6);
    run("P1", "theorem suites", [] {
        Check c;
        const int n = 200;
        suite(c, "TC(union) of compatible IO and SPO", suites::thm_union_io_spo(101, n), n);
        suite(c, "prioritized IO over 1-compatible SPO", suites::thm_prior_io_spo(102, n), n);
        suite(c, "prioritized WO over SPO", suites::thm_prior_wo_spo(103, n), n);
        suite(c, "Pareto of WOs", suites::thm_pareto_wo(104, n), n);
        suite(c, "union and Pareto of compatible WOs", suites::thm_union_wo(105, n), n);
        suite(c, "prioritized WOs", suites::prop_prior_wo(106, n), n);
        suite(c, "composition chain and collapse", suites::lemma_compositions(107, n), n);
        suite(c, "rules contain irreflexive input", suites::lemma_rules_inflationary(108, n), n);
        suite(c, "rules preserve IO", suites::lemma_rules_preserve_io(109, n), n);
        suite(c, "E2 fixpoint iff WO", suites::thm_e2_fixpoint(110, n), n);
        Check cyc = cycle_control();
        c.expect(cyc.ok, "cycle negative control" + cyc.notes.str());
        Check uw = union_wo_control();
        c.expect(uw.ok, "union-of-WOs negative control" + uw.notes.str());
        c.notes << "\n    negative controls: " << (cyc.ok && uw.ok ? "behave as expected" : "FAILED");
        return c;
    });
    run("P2", "oracle equivalence", [] {
        Check c;
        const int n = 300;
        suite(c, "transitive closure", suites::oracle_tc(201, n), n);
        suite(c, "order properties", suites::oracle_properties(202, n), n);
        suite(c, "compatibility", suites::oracle_compat(203, n), n);
        suite(c, "winnow", suites::oracle_winnow(204, n), n);
        return c;
    });
    run("P3", "incremental laws", [] {
        Check c;
        suite(c, "insert, delete bound, refine", suites::incremental(301, 300), 300);
        return c;
    });
    run("P4", "combined utilities", [] {
        Check c;
        suite(c, "0-compatible utility pairs", suites::utilities(401, 100), 100);
        return c;
    });
    run("P5", "kernels", [] {
        Check c;
        suite(c, "satisfiability", suites::kernel_sat(501, 500), 500);
        suite(c, "quantifier elimination", suites::kernel_qe(502, 500), 500);
        suite(c, "DNF round trip", suites::kernel_dnf(503, 300), 300);
        return c;
    });
    std::cout << (failures ? "FAILED " : "ALL PASSED ") << failures << " of 11 criteria failing" << std::endl;
    return failures ? 1 : 0;
}
