#ifndef PREFQ_DNF_HPP_
#define PREFQ_DNF_HPP_

#include "prefq/formula.hpp"
#include "prefq/sat.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace prefq {

/// Canonicalizes raw atoms into a clause; nullopt if one is trivially false.
inline std::optional<Conjunction> make_clause(const std::vector<Atom>& raw)
{
    std::vector<Atom> atoms;
    atoms.reserve(raw.size());
    for (const auto& a : raw)
    {
        Atom canon;
        switch (canonicalize(a, canon))
        {
        case Truth::True: break;
        case Truth::False: return std::nullopt;
        case Truth::Open: atoms.push_back(canon); break;
        }
    }
    return Conjunction(std::move(atoms));
}

/// Removes atoms implied by the rest of the clause and folds a <= b AND
/// a >= b into a = b.
inline Conjunction simplify_clause(Conjunction c)
{
    for (std::size_t i = 0; i < c.atoms.size(); ++i)
    {
        if (c.atoms[i].op != Cmp::Le)
            continue;
        for (std::size_t j = 0; j < c.atoms.size(); ++j)
        {
            const Atom& b = c.atoms[j];
            if (b.op == Cmp::Ge && b.lhs == c.atoms[i].lhs && b.rhs == c.atoms[i].rhs)
            {
                c.atoms[i].op = Cmp::Eq;
                c.atoms.erase(c.atoms.begin() + static_cast<std::ptrdiff_t>(j));
                c.normalize_order();
                i = static_cast<std::size_t>(-1);
                break;
            }
        }
    }
    for (std::size_t i = 0; i < c.atoms.size();)
    {
        Conjunction rest;
        rest.atoms.reserve(c.atoms.size() - 1);
        for (std::size_t j = 0; j < c.atoms.size(); ++j)
            if (j != i)
                rest.atoms.push_back(c.atoms[j]);
        if (entails(rest, c.atoms[i]))
            c = std::move(rest);
        else
            ++i;
    }
    return c;
}

namespace detail {

// (A AND a1) OR (A AND a2) -> A AND a where a1, a2 compare the same terms
// and their union is a single comparator, or -> A when a2 = NOT a1.
inline std::optional<Cmp> merge_ops(Cmp a, Cmp b, bool& drop)
{
    drop = cmp_complement(a) == b;
    if (drop)
        return a;
    auto has = [&](Cmp x, Cmp y) { return (a == x && b == y) || (a == y && b == x); };
    if (has(Cmp::Lt, Cmp::Eq))
        return Cmp::Le;
    if (has(Cmp::Gt, Cmp::Eq))
        return Cmp::Ge;
    if (has(Cmp::Lt, Cmp::Gt))
        return Cmp::Ne;
    return std::nullopt;
}

inline bool merge_pass(std::vector<Conjunction>& clauses)
{
    for (std::size_t i = 0; i < clauses.size(); ++i)
    {
        for (std::size_t j = i + 1; j < clauses.size(); ++j)
        {
            const auto& a = clauses[i].atoms;
            const auto& b = clauses[j].atoms;
            if (a.size() != b.size())
                continue;
            std::size_t diff = a.size();
            bool single = true;
            for (std::size_t k = 0; k < a.size(); ++k)
            {
                if (a[k] == b[k])
                    continue;
                if (diff != a.size())
                {
                    single = false;
                    break;
                }
                diff = k;
            }
            if (!single || diff == a.size())
                continue;
            const Atom& x = a[diff];
            const Atom& y = b[diff];
            if (!(x.lhs == y.lhs && x.rhs == y.rhs))
                continue;
            bool drop = false;
            auto op = merge_ops(x.op, y.op, drop);
            if (!op)
                continue;
            std::vector<Atom> atoms = a;
            if (drop)
                atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(diff));
            else
                atoms[diff].op = *op;
            clauses[i] = Conjunction(std::move(atoms));
            clauses.erase(clauses.begin() + static_cast<std::ptrdiff_t>(j));
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Drops unsatisfiable clauses, removes redundant atoms, merges clause pairs
/// that differ in one comparator, and deletes clauses implied by another.
inline Dnf normalize_dnf(Dnf d)
{
    Dnf out;
    for (auto& c : d)
        if (conj_sat(c))
            out.push_back(simplify_clause(std::move(c)));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    for (;;)
    {
        // Semantic subsumption: clause i is redundant if it implies clause j.
        std::vector<bool> dead(out.size(), false);
        for (std::size_t i = 0; i < out.size(); ++i)
        {
            for (std::size_t j = 0; j < out.size() && !dead[i]; ++j)
            {
                if (i == j || dead[j])
                    continue;
                if (entails(out[i], out[j]))
                    dead[i] = true;
            }
        }
        Dnf kept;
        for (std::size_t i = 0; i < out.size(); ++i)
            if (!dead[i])
                kept.push_back(std::move(out[i]));
        out = std::move(kept);
        if (!detail::merge_pass(out))
            break;
        for (auto& c : out)
            c = simplify_clause(std::move(c));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return out;
}

/// Conjoins two DNFs clause by clause. A clause of `a` that already implies
/// some clause of `b` absorbs the whole product for that clause.
inline Dnf dnf_and(const Dnf& a, const Dnf& b)
{
    Dnf out;
    for (const auto& ca : a)
    {
        bool absorbed = false;
        for (const auto& cb : b)
        {
            if (entails(ca, cb))
            {
                absorbed = true;
                break;
            }
        }
        if (absorbed)
        {
            out.push_back(ca);
            continue;
        }
        for (const auto& cb : b)
        {
            std::vector<Atom> atoms = ca.atoms;
            atoms.insert(atoms.end(), cb.atoms.begin(), cb.atoms.end());
            Conjunction merged(std::move(atoms));
            if (conj_sat(merged))
                out.push_back(std::move(merged));
        }
    }
    // Keep intermediate products small.
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    std::vector<bool> dead(out.size(), false);
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < out.size() && !dead[i]; ++j)
            if (i != j && !dead[j] && out[i].includes(out[j]))
                dead[i] = true;
    Dnf kept;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (!dead[i])
            kept.push_back(std::move(out[i]));
    return kept;
}

namespace detail {

inline Dnf dnf_of_nnf(const Formula& f)
{
    switch (f->kind())
    {
    case Node::Kind::True: return Dnf{Conjunction{}};
    case Node::Kind::False: return Dnf{};
    case Node::Kind::Atom: return Dnf{Conjunction({f->atom()})};
    case Node::Kind::Or:
    {
        Dnf out;
        for (const auto& c : f->children())
        {
            Dnf part = dnf_of_nnf(c);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }
    case Node::Kind::And:
    {
        // Conjoin the small factors first.
        std::vector<Dnf> parts;
        for (const auto& c : f->children())
            parts.push_back(dnf_of_nnf(c));
        std::stable_sort(parts.begin(), parts.end(),
                         [](const Dnf& x, const Dnf& y) { return x.size() < y.size(); });
        Dnf acc{Conjunction{}};
        for (const auto& p : parts)
        {
            acc = dnf_and(acc, p);
            if (acc.empty())
                break;
        }
        return acc;
    }
    case Node::Kind::Not: return dnf_of_nnf(nnf(f));
    }
    return {};
}

} // namespace detail

/// Disjunctive normal form without negation; logically equivalent to `f`.
inline Dnf to_dnf(const Formula& f) { return normalize_dnf(detail::dnf_of_nnf(nnf(f))); }

/// DNF of the negation of a DNF.
inline Dnf negate_dnf(const Dnf& d) { return to_dnf(f_not(from_dnf(d))); }

} // namespace prefq

#endif // PREFQ_DNF_HPP_
