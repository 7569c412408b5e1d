#ifndef PREFQ_CLOSURE_HPP_
#define PREFQ_CLOSURE_HPP_

#include "prefq/algebra.hpp"
#include "prefq/dnf.hpp"
#include "prefq/errors.hpp"
#include "prefq/qe.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

inline constexpr int kDefaultStageCap = 64;

namespace detail {

// Clauses of `p` with X and Y renamed.
inline Dnf clauses_at(const Dnf& d, VarId a, VarId b)
{
    Dnf out;
    auto map = [a, b](VarId v) { return v == kVarX ? a : b; };
    for (const auto& c : d)
        if (auto r = rename(c, map))
            out.push_back(std::move(*r));
    return out;
}

} // namespace detail

/// Symbolic transitive closure: accumulates p, p.p, p.p.p, ... joining on an
/// auxiliary tuple variable that is eliminated after each join, until a new
/// stage adds nothing the accumulated formula does not already imply.
inline PreferenceRelation transitive_closure(const PreferenceRelation& p, int stage_cap = kDefaultStageCap,
                                             std::string name = {})
{
    constexpr VarId z = 2;
    const Schema& schema = p.schema();
    const Dnf left = detail::clauses_at(p.dnf(), kVarX, z);
    Dnf acc = p.dnf();
    Dnf frontier = p.dnf();
    int stage = 1;
    while (!frontier.empty())
    {
        if (++stage > stage_cap)
            throw StageCapExceeded(stage_cap);
        const Dnf right = detail::clauses_at(frontier, z, kVarY);
        Dnf joined;
        for (const auto& l : left)
        {
            for (const auto& r : right)
            {
                std::vector<Atom> atoms = l.atoms;
                atoms.insert(atoms.end(), r.atoms.begin(), r.atoms.end());
                Conjunction c(std::move(atoms));
                if (!conj_sat(c))
                    continue;
                Dnf projected = eliminate_exists(c, {z});
                joined.insert(joined.end(), projected.begin(), projected.end());
            }
        }
        joined = normalize_dnf(std::move(joined));
        // Semi-naive step: keep only clauses that add something.
        const Formula not_acc = nnf(f_not(from_dnf(acc)));
        Dnf fresh;
        for (auto& c : joined)
            if (is_satisfiable(f_and({from_conjunction(c), not_acc})))
                fresh.push_back(std::move(c));
        if (fresh.empty())
            break;
        acc.insert(acc.end(), fresh.begin(), fresh.end());
        acc = normalize_dnf(std::move(acc));
        frontier = std::move(fresh);
    }
    if (name.empty())
        name = "TC(" + p.name() + ")";
    return {std::move(name), PreferenceFormula::from_dnf(schema, std::move(acc))};
}

enum class RuleId
{
    P11,
    P12,
    P2
};

inline std::string_view rule_name(RuleId r)
{
    switch (r)
    {
    case RuleId::P11: return "P11";
    case RuleId::P12: return "P12";
    case RuleId::P2: return "P2";
    }
    return "?";
}

enum class RuleSemantics
{
    Default, // P11/P12 inflationary, P2 non-inflationary
    Inflationary,
    NonInflationary
};

/// Applies one rule to the facts T described by `p`:
///   P11: T(x,z) <- T(x,y), not T(z,y), not T(y,z)
///   P12: T(x,z) <- T(y,z), not T(x,y), not T(y,x)
///   P2:  T(x,y) <- T(x,y), not T(y,x)
/// The body-only variable y is eliminated from the DNF of the body.
inline PreferenceRelation apply_rule(RuleId rule, const PreferenceRelation& p,
                                     RuleSemantics semantics = RuleSemantics::Default)
{
    constexpr VarId y = 2;
    Formula body;
    switch (rule)
    {
    case RuleId::P11:
        body = f_and({p.at(kVarX, y), f_not(p.at(kVarY, y)), f_not(p.at(y, kVarY))});
        break;
    case RuleId::P12:
        body = f_and({p.at(y, kVarY), f_not(p.at(kVarX, y)), f_not(p.at(y, kVarX))});
        break;
    case RuleId::P2: body = f_and({p.at(kVarX, kVarY), f_not(p.at(kVarY, kVarX))}); break;
    }
    Dnf derived = eliminate_exists(to_dnf(body), {y});
    const bool inflationary = semantics == RuleSemantics::Inflationary ||
                              (semantics == RuleSemantics::Default && rule != RuleId::P2);
    if (inflationary)
        derived.insert(derived.end(), p.dnf().begin(), p.dnf().end());
    return {std::string(rule_name(rule)) + "(" + p.name() + ")",
            PreferenceFormula::from_dnf(p.schema(), std::move(derived))};
}

enum class RuleExpression
{
    E1, // ((P11 | P12) ; P2)+
    E2  // (P11 ; P12)+
};

struct Stage
{
    int index = 0;
    PreferenceRelation relation;
    bool is_wo = false;
    bool new_facts = false;
};

struct StageTrace
{
    std::vector<Stage> stages;
    std::vector<std::string> warnings;

    const PreferenceRelation& last() const { return stages.back().relation; }
};

/// Iterates a Rule Algebra expression. Stops at the first stage that is a
/// weak order, at a stage that adds nothing new, or throws at the cap.
inline StageTrace eval_expression(RuleExpression expr, const PreferenceRelation& p,
                                  int stage_cap = kDefaultStageCap)
{
    StageTrace trace;
    if (expr == RuleExpression::E2 && !check_property(p, OrderProperty::IO))
        trace.warnings.push_back("input is not an interval order; termination is not guaranteed");
    PreferenceRelation current = p;
    for (int i = 1;; ++i)
    {
        if (i > stage_cap)
            throw StageCapExceeded(stage_cap);
        PreferenceRelation next;
        if (expr == RuleExpression::E1)
        {
            auto a = apply_rule(RuleId::P11, current, RuleSemantics::NonInflationary);
            auto b = apply_rule(RuleId::P12, current, RuleSemantics::NonInflationary);
            next = apply_rule(RuleId::P2, compose(a, b, Composition::Union));
        }
        else
        {
            next = apply_rule(RuleId::P12, apply_rule(RuleId::P11, current, RuleSemantics::Inflationary),
                              RuleSemantics::Inflationary);
        }
        Stage s;
        s.index = i;
        s.new_facts = !equivalent(next.formula(), current.formula());
        s.is_wo = check_property(next, OrderProperty::WO);
        s.relation = next.renamed("T" + std::to_string(i));
        trace.stages.push_back(s);
        if (!s.new_facts || s.is_wo)
            break;
        current = std::move(next);
    }
    return trace;
}

/// Weak-order extension of an interval order via E2.
inline PreferenceRelation wo_extension_io(const PreferenceRelation& p, int stage_cap = kDefaultStageCap)
{
    if (!check_property(p, OrderProperty::IO))
        throw NotAnIntervalOrder();
    StageTrace trace = eval_expression(RuleExpression::E2, p, stage_cap);
    if (!trace.stages.back().is_wo)
        throw Error("E2 reached a fixpoint that is not a weak order");
    return trace.last().renamed("WO(" + p.name() + ")");
}

} // namespace prefq

#endif // PREFQ_CLOSURE_HPP_
