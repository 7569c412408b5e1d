#ifndef PREFQ_QE_HPP_
#define PREFQ_QE_HPP_

#include "prefq/dnf.hpp"
#include "prefq/formula.hpp"
#include "prefq/sat.hpp"

#include <optional>
#include <set>
#include <vector>

namespace prefq {

namespace detail {

inline bool mentions(const Atom& a, const Term& t) { return a.lhs == t || a.rhs == t; }

inline const Term& other_side(const Atom& a, const Term& t) { return a.lhs == t ? a.rhs : a.lhs; }

inline std::optional<Conjunction> substitute(const Conjunction& c, const Term& from, const Term& to)
{
    std::vector<Atom> raw;
    raw.reserve(c.atoms.size());
    for (const auto& a : c.atoms)
    {
        Atom b = a;
        if (b.lhs == from)
            b.lhs = to;
        if (b.rhs == from)
            b.rhs = to;
        raw.push_back(b);
    }
    return make_clause(raw);
}

// Eliminates one attribute term from a satisfiable clause.
inline void eliminate_term(const Conjunction& c, const Term& v, Dnf& out)
{
    for (const auto& a : c.atoms)
    {
        if (a.op == Cmp::Eq && mentions(a, v))
        {
            if (auto s = substitute(c, v, other_side(a, v)))
                out.push_back(std::move(*s));
            return;
        }
    }

    std::vector<Atom> rest;
    std::vector<std::pair<Term, bool>> lower, upper; // (bound, strict)
    std::vector<Term> excluded;
    Sort sort = Sort::D;
    for (const auto& a : c.atoms)
    {
        if (!mentions(a, v))
        {
            rest.push_back(a);
            continue;
        }
        sort = a.sort;
        // Normalize to "v op t".
        const bool v_left = a.lhs == v;
        const Term& t = v_left ? a.rhs : a.lhs;
        const Cmp op = v_left ? a.op : cmp_mirror(a.op);
        switch (op)
        {
        case Cmp::Ne: excluded.push_back(t); break;
        case Cmp::Lt: upper.emplace_back(t, true); break;
        case Cmp::Le: upper.emplace_back(t, false); break;
        case Cmp::Gt: lower.emplace_back(t, true); break;
        case Cmp::Ge: lower.emplace_back(t, false); break;
        case Cmp::Eq: break; // handled above
        }
    }
    // Over the infinite D, finitely many disequalities are always satisfiable.
    if (sort == Sort::D)
    {
        if (auto s = make_clause(rest))
            out.push_back(std::move(*s));
        return;
    }

    // Dense order: every lower bound below every upper bound.
    for (const auto& [l, ls] : lower)
        for (const auto& [u, us] : upper)
            rest.push_back(Atom{l, (ls || us) ? Cmp::Lt : Cmp::Le, u, Sort::Q});
    auto base = make_clause(rest);
    if (!base)
        return;
    // A point interval [l, u] with l = u must avoid every excluded value:
    // for non-strict l, u and excluded n: l < u OR l != n.
    Dnf acc{*base};
    for (const auto& [l, ls] : lower)
    {
        if (ls)
            continue;
        for (const auto& [u, us] : upper)
        {
            if (us)
                continue;
            for (const auto& n : excluded)
            {
                Dnf choice;
                if (auto c1 = make_clause({Atom{l, Cmp::Lt, u, Sort::Q}}))
                    choice.push_back(*c1);
                if (auto c2 = make_clause({Atom{l, Cmp::Ne, n, Sort::Q}}))
                    choice.push_back(*c2);
                acc = dnf_and(acc, choice);
            }
        }
    }
    for (auto& r : acc)
        out.push_back(std::move(r));
}

} // namespace detail

/// Eliminates the given auxiliary tuple variables from a conjunction over an
/// infinite D and the dense rationals. The disjunction of the result is
/// equivalent to the existential projection.
inline Dnf eliminate_exists(const Conjunction& c, const std::set<VarId>& vars)
{
    Dnf work{c};
    for (;;)
    {
        // Find any clause still mentioning an eliminated variable.
        bool changed = false;
        Dnf next;
        for (auto& clause : work)
        {
            if (!conj_sat(clause))
                continue;
            std::optional<Term> target;
            for (const auto& a : clause.atoms)
            {
                for (const Term* t : {&a.lhs, &a.rhs})
                    if (!t->constant && vars.count(t->var))
                    {
                        target = *t;
                        break;
                    }
                if (target)
                    break;
            }
            if (!target)
            {
                next.push_back(std::move(clause));
                continue;
            }
            changed = true;
            detail::eliminate_term(clause, *target, next);
        }
        work = std::move(next);
        if (!changed)
            break;
    }
    return normalize_dnf(std::move(work));
}

inline Dnf eliminate_exists(const Dnf& d, const std::set<VarId>& vars)
{
    Dnf out;
    for (const auto& c : d)
    {
        Dnf part = eliminate_exists(c, vars);
        out.insert(out.end(), part.begin(), part.end());
    }
    return normalize_dnf(std::move(out));
}

} // namespace prefq

#endif // PREFQ_QE_HPP_
