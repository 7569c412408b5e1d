#ifndef PREFQ_SAT_HPP_
#define PREFQ_SAT_HPP_

#include "prefq/formula.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace prefq {

namespace detail {

class TermIds
{
  public:
    int id(const Term& t)
    {
        auto [it, inserted] = ids_.try_emplace(t, static_cast<int>(terms_.size()));
        if (inserted)
            terms_.push_back(t);
        return it->second;
    }
    const std::vector<Term>& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }

  private:
    std::map<Term, int> ids_;
    std::vector<Term> terms_;
};

class UnionFind
{
  public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x)
    {
        while (parent_[x] != x)
        {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

  private:
    std::vector<int> parent_;
};

// Equality closure with constant-clash and disequality checks.
inline bool equality_sat(std::span<const Atom> atoms)
{
    TermIds ids;
    std::vector<std::pair<int, int>> eqs, nes;
    for (const auto& a : atoms)
    {
        if (a.sort != Sort::D)
            continue;
        int l = ids.id(a.lhs), r = ids.id(a.rhs);
        if (a.op == Cmp::Eq)
            eqs.emplace_back(l, r);
        else if (a.op == Cmp::Ne)
            nes.emplace_back(l, r);
    }
    if (ids.size() == 0)
        return true;
    UnionFind uf(ids.size());
    for (auto [l, r] : eqs)
        uf.unite(l, r);
    std::vector<int> const_of(ids.size(), -1);
    for (std::size_t i = 0; i < ids.size(); ++i)
    {
        if (!ids.terms()[i].constant)
            continue;
        int root = uf.find(static_cast<int>(i));
        if (const_of[root] >= 0)
            return false; // two distinct constants were identified
        const_of[root] = static_cast<int>(i);
    }
    for (auto [l, r] : nes)
        if (uf.find(l) == uf.find(r))
            return false;
    return true;
}

// Dense-order check: no strict edge inside a strongly connected component of
// the <=/< graph and no disequality between terms of one component.
inline bool order_sat(std::span<const Atom> atoms)
{
    TermIds ids;
    struct Edge
    {
        int from, to;
        bool strict;
    };
    std::vector<Edge> edges;
    std::vector<std::pair<int, int>> nes;
    for (const auto& a : atoms)
    {
        if (a.sort != Sort::Q)
            continue;
        int l = ids.id(a.lhs), r = ids.id(a.rhs);
        switch (a.op)
        {
        case Cmp::Eq:
            edges.push_back({l, r, false});
            edges.push_back({r, l, false});
            break;
        case Cmp::Ne: nes.emplace_back(l, r); break;
        case Cmp::Lt: edges.push_back({l, r, true}); break;
        case Cmp::Le: edges.push_back({l, r, false}); break;
        case Cmp::Gt: edges.push_back({r, l, true}); break;
        case Cmp::Ge: edges.push_back({r, l, false}); break;
        }
    }
    const int n = static_cast<int>(ids.size());
    if (n == 0)
        return true;
    // Chain the mentioned constants in their numeric order.
    std::vector<int> consts;
    for (int i = 0; i < n; ++i)
        if (ids.terms()[i].constant)
            consts.push_back(i);
    std::sort(consts.begin(), consts.end(),
              [&](int a, int b) { return ids.terms()[a].value < ids.terms()[b].value; });
    for (std::size_t i = 1; i < consts.size(); ++i)
        edges.push_back({consts[i - 1], consts[i], true});

    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges)
        adj[e.from].push_back(e.to);

    // Tarjan's SCC, iterative.
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1), stack;
    std::vector<bool> on_stack(n, false);
    int counter = 0, comps = 0;
    for (int root = 0; root < n; ++root)
    {
        if (index[root] >= 0)
            continue;
        std::vector<std::pair<int, std::size_t>> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty())
        {
            auto& [v, next] = frames.back();
            if (next < adj[v].size())
            {
                int w = adj[v][next++];
                if (index[w] < 0)
                {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                }
                else if (on_stack[w])
                {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v])
            {
                int w;
                do
                {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = comps;
                } while (w != v);
                ++comps;
            }
            int done = v;
            frames.pop_back();
            if (!frames.empty())
                low[frames.back().first] = std::min(low[frames.back().first], low[done]);
        }
    }
    for (const auto& e : edges)
        if (e.strict && comp[e.from] == comp[e.to])
            return false;
    for (auto [l, r] : nes)
        if (comp[l] == comp[r])
            return false;
    return true;
}

} // namespace detail

/// Satisfiability of a conjunction of ERO atoms over an infinite D and the
/// dense rationals.
inline bool conj_sat(std::span<const Atom> atoms)
{
    return detail::equality_sat(atoms) && detail::order_sat(atoms);
}

inline bool conj_sat(const Conjunction& c) { return conj_sat(std::span<const Atom>(c.atoms)); }

/// True when every model of `c` satisfies `a`.
inline bool entails(const Conjunction& c, const Atom& a)
{
    std::vector<Atom> atoms = c.atoms;
    atoms.push_back(a.complement());
    return !conj_sat(atoms);
}

inline bool entails(const Conjunction& c, const Conjunction& d)
{
    if (c.includes(d))
        return true;
    for (const auto& a : d.atoms)
        if (!std::binary_search(c.atoms.begin(), c.atoms.end(), a) && !entails(c, a))
            return false;
    return true;
}

// ---------------------------------------------------------------------------
// Satisfiability of arbitrary quantifier-free formulas: backtracking over
// disjunctions of the negation normal form, pruned by conj_sat.

namespace detail {

class SatSearch
{
  public:
    std::optional<Conjunction> run(Conjunction atoms, std::vector<Formula> todo)
    {
        std::vector<Formula> ors;
        while (!todo.empty())
        {
            Formula f = std::move(todo.back());
            todo.pop_back();
            switch (f->kind())
            {
            case Node::Kind::True: break;
            case Node::Kind::False: return std::nullopt;
            case Node::Kind::Atom: atoms.atoms.push_back(f->atom()); break;
            case Node::Kind::And:
                todo.insert(todo.end(), f->children().begin(), f->children().end());
                break;
            case Node::Kind::Or: ors.push_back(std::move(f)); break;
            case Node::Kind::Not: todo.push_back(nnf(f)); break;
            }
        }
        atoms.normalize_order();
        if (!conj_sat(atoms))
            return std::nullopt;

        // Drop satisfied disjunctions, prune refuted disjuncts, branch on the
        // most constrained remaining one.
        std::vector<std::vector<Formula>> open;
        for (const auto& o : ors)
        {
            std::vector<Formula> alive;
            bool satisfied = false;
            for (const auto& child : o->children())
            {
                if (child->kind() == Node::Kind::Atom)
                {
                    const Atom& a = child->atom();
                    if (std::binary_search(atoms.atoms.begin(), atoms.atoms.end(), a) ||
                        entails(atoms, a))
                    {
                        satisfied = true;
                        break;
                    }
                    std::vector<Atom> probe = atoms.atoms;
                    probe.push_back(a);
                    if (!conj_sat(probe))
                        continue;
                }
                alive.push_back(child);
            }
            if (satisfied)
                continue;
            if (alive.empty())
                return std::nullopt;
            open.push_back(std::move(alive));
        }
        if (open.empty())
            return atoms;
        std::size_t pick = 0;
        for (std::size_t i = 1; i < open.size(); ++i)
            if (open[i].size() < open[pick].size())
                pick = i;
        std::vector<Formula> rest;
        for (std::size_t i = 0; i < open.size(); ++i)
            if (i != pick)
                rest.push_back(f_or(open[i]));
        for (const auto& choice : open[pick])
        {
            std::vector<Formula> next = rest;
            next.push_back(choice);
            if (auto found = run(atoms, std::move(next)))
                return found;
        }
        return std::nullopt;
    }
};

} // namespace detail

/// Returns a satisfiable conjunction of atoms that implies `f`, if any.
inline std::optional<Conjunction> satisfying_conjunction(const Formula& f)
{
    return detail::SatSearch{}.run(Conjunction{}, {nnf(f)});
}

inline bool is_satisfiable(const Formula& f) { return satisfying_conjunction(f).has_value(); }

inline bool implies(const Formula& f, const Formula& g)
{
    return !is_satisfiable(f_and({f, f_not(g)}));
}

inline bool equivalent(const Formula& f, const Formula& g) { return implies(f, g) && implies(g, f); }

// ---------------------------------------------------------------------------
// Symbolic universes and model construction.

/// Candidate values for one sort: every mentioned constant plus enough fresh
/// points (`slots` per gap for Q, `slots` new constants for D) that any
/// satisfiable conjunction over at most `slots` terms of this sort has a
/// model inside the universe. Values are returned in ascending order.
inline std::vector<Value> symbolic_universe(Sort sort, const std::set<Value>& constants,
                                            std::size_t slots)
{
    std::vector<Value> out;
    if (sort == Sort::D)
    {
        for (const auto& c : constants)
            if (c.is_text())
                out.push_back(c);
        std::size_t k = 0;
        for (std::size_t made = 0; made < slots; ++k)
        {
            Value fresh = Value::text("~" + std::to_string(k));
            if (!constants.count(fresh))
            {
                out.push_back(fresh);
                ++made;
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
    std::vector<Rational> cs;
    for (const auto& c : constants)
        if (!c.is_text())
            cs.push_back(c.as_rational());
    if (cs.empty())
    {
        for (std::size_t j = 0; j < slots; ++j)
            out.push_back(Value::rational(Rational(static_cast<long>(j))));
        return out;
    }
    const long n = static_cast<long>(slots);
    for (long j = n; j >= 1; --j)
        out.push_back(Value::rational(cs.front() - j));
    for (std::size_t i = 0; i < cs.size(); ++i)
    {
        out.push_back(Value::rational(cs[i]));
        if (i + 1 < cs.size())
        {
            Rational gap = cs[i + 1] - cs[i];
            for (long j = 1; j <= n; ++j)
            {
                Rational p = cs[i] + gap * Rational(j, n + 1);
                p.canonicalize();
                out.push_back(Value::rational(p));
            }
        }
    }
    for (long j = 1; j <= n; ++j)
        out.push_back(Value::rational(cs.back() + j));
    return out;
}

inline bool eval_atom(const Atom& a, const Value& l, const Value& r)
{
    return cmp_holds(a.op, l <=> r);
}

/// Lexicographically least assignment (attribute terms in (var, attr) order,
/// universe values ascending) satisfying `c`, for tuple variables
/// 0..nvars-1 over `schema`. Returns nullopt if `c` is unsatisfiable.
inline std::optional<std::vector<Tuple>> find_model(const Conjunction& c, const Schema& schema,
                                                    int nvars)
{
    std::set<Value> constants;
    for (const auto& a : c.atoms)
    {
        if (a.lhs.constant)
            constants.insert(a.lhs.value);
        if (a.rhs.constant)
            constants.insert(a.rhs.value);
    }
    const std::size_t slots = static_cast<std::size_t>(nvars) * schema.size();
    const std::vector<Value> dom_d = symbolic_universe(Sort::D, constants, slots);
    const std::vector<Value> dom_q = symbolic_universe(Sort::Q, constants, slots);

    const std::size_t k = schema.size();
    std::vector<Tuple> model(nvars, Tuple(k));
    std::vector<bool> assigned(nvars * k, false);
    auto value_of = [&](const Term& t) -> const Value* {
        if (t.constant)
            return &t.value;
        if (!assigned[t.var * k + t.attr])
            return nullptr;
        return &model[t.var][t.attr];
    };
    std::function<bool(std::size_t)> assign = [&](std::size_t slot) -> bool {
        if (slot == assigned.size())
            return true;
        const int v = static_cast<int>(slot / k);
        const std::size_t attr = slot % k;
        const auto& dom = schema[attr].sort == Sort::D ? dom_d : dom_q;
        for (const auto& candidate : dom)
        {
            model[v][attr] = candidate;
            assigned[slot] = true;
            bool ok = true;
            for (const auto& a : c.atoms)
            {
                const Value* l = value_of(a.lhs);
                const Value* r = value_of(a.rhs);
                if (l && r && !eval_atom(a, *l, *r))
                {
                    ok = false;
                    break;
                }
            }
            if (ok && assign(slot + 1))
                return true;
            assigned[slot] = false;
        }
        return false;
    };
    for (const auto& a : c.atoms)
        if ((!a.lhs.constant && a.lhs.var >= nvars) || (!a.rhs.constant && a.rhs.var >= nvars))
            return std::nullopt;
    if (!conj_sat(c) || !assign(0))
        return std::nullopt;
    return model;
}

} // namespace prefq

#endif // PREFQ_SAT_HPP_
