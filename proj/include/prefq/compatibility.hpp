#ifndef PREFQ_COMPATIBILITY_HPP_
#define PREFQ_COMPATIBILITY_HPP_

#include "prefq/algebra.hpp"
#include "prefq/closure.hpp"
#include "prefq/qe.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prefq {

/// How the second chain of a 2-conflict ends.
///  DualChain: t1 (>0 - >^-1)+ t2, every edge of the chain in >0.
///  Literal:   t1 (>0 - >^-1)+ w, w (> - >^-1) t2, the last edge in >.
enum class Level2Reading
{
    DualChain,
    Literal
};

struct ConflictReport
{
    int level = 0;
    PreferenceFormula witness_formula; // pairs (x, y) = (t1, t2) in conflict
    bool satisfiable = false;
    std::optional<std::pair<Tuple, Tuple>> sample_witness;
};

namespace detail {

// a - b^-1: a(X,Y) and not b(Y,X).
inline PreferenceRelation minus_inverse(const PreferenceRelation& a, const PreferenceRelation& b)
{
    return {a.name() + "-" + b.name() + "^-1",
            PreferenceFormula::from_dnf(a.schema(), to_dnf(f_and({a.at(kVarX, kVarY), f_not(b.at(kVarY, kVarX))})))};
}

inline std::optional<std::pair<Tuple, Tuple>> least_witness(const PreferenceFormula& f)
{
    std::optional<std::pair<Tuple, Tuple>> best;
    for (const auto& c : f.dnf())
    {
        auto m = find_model(c, f.schema(), 2);
        if (!m)
            continue;
        std::pair<Tuple, Tuple> cand{(*m)[0], (*m)[1]};
        if (!best || cand < *best)
            best = std::move(cand);
    }
    return best;
}

} // namespace detail

/// Formula of the level-i conflicts between p (playing >) and p0 (playing >0).
inline ConflictReport conflict_formula(const PreferenceRelation& p, const PreferenceRelation& p0, int level,
                                       Level2Reading reading = Level2Reading::DualChain,
                                       int stage_cap = kDefaultStageCap)
{
    require_same_schema(p.schema(), p0.schema());
    if (level < 0 || level > 2)
        throw Error("conflict level must be 0, 1 or 2");
    Formula body;
    if (level == 0)
    {
        body = f_and({p0.at(kVarX, kVarY), p.at(kVarY, kVarX)});
    }
    else
    {
        const auto chain = transitive_closure(detail::minus_inverse(p, p0), stage_cap);
        if (level == 1)
        {
            body = f_and({p0.at(kVarX, kVarY), chain.at(kVarY, kVarX)});
        }
        else
        {
            const auto chain0 = transitive_closure(detail::minus_inverse(p0, p), stage_cap);
            if (reading == Level2Reading::DualChain)
            {
                body = f_and({chain.at(kVarY, kVarX), chain0.at(kVarX, kVarY)});
            }
            else
            {
                constexpr VarId w = 2;
                const auto last = detail::minus_inverse(p, p);
                Dnf joined = eliminate_exists(to_dnf(f_and({chain0.at(kVarX, w), last.at(w, kVarY)})), {w});
                body = f_and({chain.at(kVarY, kVarX), from_dnf(joined)});
            }
        }
    }
    ConflictReport report;
    report.level = level;
    report.witness_formula = PreferenceFormula::from_dnf(p.schema(), to_dnf(body));
    report.satisfiable = is_satisfiable(report.witness_formula);
    if (report.satisfiable)
        report.sample_witness = detail::least_witness(report.witness_formula);
    return report;
}

/// p is i-compatible with p0 iff there are no i-conflicts between them.
inline bool is_compatible(const PreferenceRelation& p, const PreferenceRelation& p0, int level,
                          Level2Reading reading = Level2Reading::DualChain, int stage_cap = kDefaultStageCap)
{
    return !conflict_formula(p, p0, level, reading, stage_cap).satisfiable;
}

} // namespace prefq

#endif // PREFQ_COMPATIBILITY_HPP_
