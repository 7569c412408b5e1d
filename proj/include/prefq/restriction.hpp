#ifndef PREFQ_RESTRICTION_HPP_
#define PREFQ_RESTRICTION_HPP_

#include "prefq/algebra.hpp"
#include "prefq/closure.hpp"
#include "prefq/compatibility.hpp"
#include "prefq/instance.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace prefq {

/// An explicit preference relation over the tuples of one instance,
/// stored as an adjacency matrix indexed by tuple position.
class FinitePreference
{
  public:
    FinitePreference() = default;
    explicit FinitePreference(Instance instance)
        : instance_(std::move(instance)), adj_(instance_.size() * instance_.size(), 0)
    {
    }

    FinitePreference(Instance instance, const std::vector<std::pair<Tuple, Tuple>>& edges)
        : FinitePreference(std::move(instance))
    {
        for (const auto& [t, s] : edges)
            add(t, s);
    }

    const Instance& instance() const noexcept { return instance_; }
    std::size_t size() const noexcept { return instance_.size(); }

    bool has(std::size_t i, std::size_t j) const { return adj_[i * size() + j] != 0; }
    void set(std::size_t i, std::size_t j, bool on = true) { adj_[i * size() + j] = on; }

    bool has(const Tuple& t, const Tuple& s) const
    {
        auto i = instance_.index_of(t);
        auto j = instance_.index_of(s);
        return i && j && has(*i, *j);
    }

    void add(const Tuple& t, const Tuple& s)
    {
        auto i = instance_.index_of(t);
        auto j = instance_.index_of(s);
        if (!i || !j)
            throw Error("edge " + tuple_str(t) + " > " + tuple_str(s) + " leaves instance '" + instance_.name() + "'");
        set(*i, *j);
    }

    std::vector<std::pair<Tuple, Tuple>> edges() const
    {
        std::vector<std::pair<Tuple, Tuple>> out;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (has(i, j))
                    out.emplace_back(instance_[i], instance_[j]);
        return out;
    }

    std::size_t edge_count() const
    {
        std::size_t n = 0;
        for (char c : adj_)
            n += c != 0;
        return n;
    }

    /// Same edge set as tuple pairs (instances may list tuples in any order).
    friend bool operator==(const FinitePreference& a, const FinitePreference& b)
    {
        if (!a.instance_.same_set(b.instance_) || a.edge_count() != b.edge_count())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < a.size(); ++j)
                if (a.has(i, j) && !b.has(a.instance_[i], a.instance_[j]))
                    return false;
        return true;
    }

  private:
    Instance instance_;
    std::vector<char> adj_;
};

/// Every edge of a is an edge of b.
inline bool is_subset(const FinitePreference& a, const FinitePreference& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            if (a.has(i, j) && !b.has(a.instance()[i], a.instance()[j]))
                return false;
    return true;
}

/// p intersected with r x r.
inline FinitePreference restrict(const PreferenceRelation& p, const Instance& r)
{
    require_same_schema(p.schema(), r.schema());
    FinitePreference f(r);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            if (eval_ground(p.formula(), r[i], r[j]))
                f.set(i, j);
    return f;
}

/// Floyd-Warshall closure.
inline FinitePreference finite_tc(FinitePreference f)
{
    const std::size_t n = f.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (f.has(i, k))
                for (std::size_t j = 0; j < n; ++j)
                    if (f.has(k, j))
                        f.set(i, j);
    return f;
}

inline FinitePreference finite_inverse(const FinitePreference& f)
{
    FinitePreference out(f.instance());
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j)
            if (f.has(i, j))
                out.set(j, i);
    return out;
}

namespace detail {

// Re-indexes b onto a's instance; both must hold the same tuple set.
inline FinitePreference align(const FinitePreference& b, const Instance& onto)
{
    if (!b.instance().same_set(onto))
        throw SchemaMismatch("finite preferences are over different instances");
    FinitePreference out(onto);
    for (std::size_t i = 0; i < onto.size(); ++i)
        for (std::size_t j = 0; j < onto.size(); ++j)
            if (b.has(onto[i], onto[j]))
                out.set(i, j);
    return out;
}

} // namespace detail

/// The composition operators applied edge by edge; a plays the first operand.
inline FinitePreference compose_edgewise(const FinitePreference& a, const FinitePreference& b_in, Composition op)
{
    const FinitePreference b = detail::align(b_in, a.instance());
    FinitePreference out(a.instance());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
        {
            bool e = false;
            switch (op)
            {
            case Composition::Union: e = a.has(i, j) || b.has(i, j); break;
            case Composition::Prioritized: e = a.has(i, j) || (!a.has(j, i) && b.has(i, j)); break;
            case Composition::Pareto:
                e = (a.has(i, j) && !b.has(j, i)) || (b.has(i, j) && !a.has(j, i));
                break;
            }
            out.set(i, j, e);
        }
    return out;
}

inline bool finite_check(const FinitePreference& f, OrderProperty prop)
{
    const std::size_t n = f.size();
    auto irreflexive = [&] {
        for (std::size_t i = 0; i < n; ++i)
            if (f.has(i, i))
                return false;
        return true;
    };
    auto transitive = [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (f.has(i, j) && f.has(j, k) && !f.has(i, k))
                        return false;
        return true;
    };
    auto neg_transitive = [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (!f.has(i, j) && !f.has(j, k) && f.has(i, k))
                        return false;
        return true;
    };
    auto connected = [&] {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && !f.has(i, j) && !f.has(j, i))
                    return false;
        return true;
    };
    auto interval = [&] {
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y)
                if (f.has(x, y))
                    for (std::size_t z = 0; z < n; ++z)
                        for (std::size_t w = 0; w < n; ++w)
                            if (f.has(z, w) && !f.has(x, w) && !f.has(z, y))
                                return false;
        return true;
    };
    switch (prop)
    {
    case OrderProperty::Irreflexive: return irreflexive();
    case OrderProperty::Transitive: return transitive();
    case OrderProperty::NegativelyTransitive: return neg_transitive();
    case OrderProperty::Connected: return connected();
    case OrderProperty::SPO: return irreflexive() && transitive();
    case OrderProperty::IO: return irreflexive() && transitive() && interval();
    case OrderProperty::WO: return irreflexive() && transitive() && neg_transitive();
    case OrderProperty::TotalOrder: return irreflexive() && transitive() && connected();
    }
    return false;
}

namespace detail {

// a - b^-1 over a common instance.
inline FinitePreference finite_minus_inverse(const FinitePreference& a, const FinitePreference& b)
{
    FinitePreference out(a.instance());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            out.set(i, j, a.has(i, j) && !b.has(j, i));
    return out;
}

// reach[i][j]: a path of one or more edges from i to j, by depth-first
// search from every start.
inline std::vector<std::vector<char>> reachability(const FinitePreference& f)
{
    const std::size_t n = f.size();
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t s = 0; s < n; ++s)
    {
        std::vector<std::size_t> stack;
        for (std::size_t j = 0; j < n; ++j)
            if (f.has(s, j) && !reach[s][j])
            {
                reach[s][j] = 1;
                stack.push_back(j);
            }
        while (!stack.empty())
        {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j)
                if (f.has(u, j) && !reach[s][j])
                {
                    reach[s][j] = 1;
                    stack.push_back(j);
                }
        }
    }
    return reach;
}

} // namespace detail

/// All pairs (t1, t2) that form a level-i conflict; f plays >, f0 plays >0.
inline std::vector<std::pair<Tuple, Tuple>> finite_conflicts(const FinitePreference& f, const FinitePreference& f0_in,
                                                             int level,
                                                             Level2Reading reading = Level2Reading::DualChain)
{
    const FinitePreference f0 = detail::align(f0_in, f.instance());
    const std::size_t n = f.size();
    const auto& r = f.instance();
    std::vector<std::pair<Tuple, Tuple>> out;
    if (level == 0)
    {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (f0.has(a, b) && f.has(b, a))
                    out.emplace_back(r[a], r[b]);
        return out;
    }
    const auto chain = detail::reachability(detail::finite_minus_inverse(f, f0));
    if (level == 1)
    {
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (f0.has(a, b) && chain[b][a])
                    out.emplace_back(r[a], r[b]);
        return out;
    }
    if (level != 2)
        throw Error("conflict level must be 0, 1 or 2");
    const auto chain0 = detail::reachability(detail::finite_minus_inverse(f0, f));
    const auto last = detail::finite_minus_inverse(f, f);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
        {
            if (!chain[b][a])
                continue;
            bool second = false;
            if (reading == Level2Reading::DualChain)
                second = chain0[a][b];
            else
                for (std::size_t w = 0; w < n && !second; ++w)
                    second = chain0[a][w] && last.has(w, b);
            if (second)
                out.emplace_back(r[a], r[b]);
        }
    return out;
}

inline bool finite_compatible(const FinitePreference& f, const FinitePreference& f0, int level,
                              Level2Reading reading = Level2Reading::DualChain)
{
    return finite_conflicts(f, f0, level, reading).empty();
}

/// Tuples of f's instance with no incoming edge.
inline Instance winnow_finite(const FinitePreference& f)
{
    std::vector<Tuple> out;
    for (std::size_t j = 0; j < f.size(); ++j)
    {
        bool dominated = false;
        for (std::size_t i = 0; i < f.size() && !dominated; ++i)
            dominated = f.has(i, j);
        if (!dominated)
            out.push_back(f.instance()[j]);
    }
    return Instance(f.instance().name(), f.instance().schema(), std::move(out));
}

struct RevisionVariants
{
    PreferenceRelation v1; // TC(p0 op p)
    FinitePreference v2;   // TC(p0 op p) restricted to r
    FinitePreference v3;   // TC((p0 op p) restricted to r)
    FinitePreference v4;   // TC(p0|r op p|r)
};

/// The four ways of closing a revision relative to a finite instance.
inline RevisionVariants revision_variants(const PreferenceRelation& p, const PreferenceRelation& p0, Composition op,
                                          const Instance& r, int stage_cap = kDefaultStageCap)
{
    require_same_schema(p.schema(), p0.schema());
    require_same_schema(p.schema(), r.schema());
    const PreferenceRelation composed = compose(p0, p, op);
    RevisionVariants v;
    v.v1 = transitive_closure(composed, stage_cap, "TC" + composed.name());
    v.v2 = restrict(v.v1, r);
    v.v3 = finite_tc(restrict(composed, r));
    v.v4 = finite_tc(compose_edgewise(restrict(p0, r), restrict(p, r), op));
    if (!(v.v4 == v.v3) || !is_subset(v.v3, v.v2))
        throw std::logic_error("revision variants violate v4 == v3 <= v2");
    return v;
}

/// sum(coef * attr) + sum(coef * [attr = value]) + constant
struct UtilityExpr
{
    struct Linear
    {
        std::string attr;
        Rational coef;
    };
    struct Indicator
    {
        std::string attr;
        Value value;
        Rational coef;
    };

    std::vector<Linear> linear;
    std::vector<Indicator> indicators;
    Rational constant = 0;

    void validate(const Schema& s) const
    {
        for (const auto& l : linear)
        {
            auto i = s.index_of(l.attr);
            if (!i)
                throw TypeError("unknown attribute '" + l.attr + "' in utility");
            if (s[*i].sort != Sort::Q)
                throw TypeError("utility term on non-rat attribute '" + l.attr + "'");
        }
        for (const auto& ind : indicators)
        {
            auto i = s.index_of(ind.attr);
            if (!i)
                throw TypeError("unknown attribute '" + ind.attr + "' in utility");
            if (s[*i].sort != ind.value.sort())
                throw TypeError("indicator constant has the wrong sort for '" + ind.attr + "'");
        }
    }

    Rational eval(const Tuple& t, const Schema& s) const
    {
        Rational v = constant;
        for (const auto& l : linear)
            v += l.coef * t[*s.index_of(l.attr)].as_rational();
        for (const auto& ind : indicators)
            if (t[*s.index_of(ind.attr)] == ind.value)
                v += ind.coef;
        return v;
    }

    std::string str() const
    {
        std::string out;
        auto term = [&out](const Rational& c, const std::string& body) {
            out += out.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
            Rational a = abs(c);
            if (a != 1 || body.empty())
                out += format_rational(a) + (body.empty() ? "" : "*");
            out += body;
        };
        for (const auto& l : linear)
            term(l.coef, l.attr);
        for (const auto& ind : indicators)
            term(ind.coef, "[" + ind.attr + " = " + ind.value.literal() + "]");
        if (constant != 0 || out.empty())
            term(constant, "");
        return out;
    }

    /// a*u + b*v + c
    static UtilityExpr affine(const UtilityExpr& u, const Rational& a, const UtilityExpr& v, const Rational& b,
                              const Rational& c)
    {
        UtilityExpr out;
        for (const auto& l : u.linear)
            out.linear.push_back({l.attr, a * l.coef});
        for (const auto& l : v.linear)
            out.linear.push_back({l.attr, b * l.coef});
        for (const auto& ind : u.indicators)
            out.indicators.push_back({ind.attr, ind.value, a * ind.coef});
        for (const auto& ind : v.indicators)
            out.indicators.push_back({ind.attr, ind.value, b * ind.coef});
        out.constant = a * u.constant + b * v.constant + c;
        return out;
    }
};

/// t > s iff u(t) > u(s).
inline FinitePreference utility_pref(const Instance& r, const UtilityExpr& u)
{
    u.validate(r.schema());
    std::vector<Rational> vals;
    vals.reserve(r.size());
    for (const auto& t : r.tuples())
        vals.push_back(u.eval(t, r.schema()));
    FinitePreference f(r);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            f.set(i, j, vals[i] > vals[j]);
    return f;
}

/// a*u + b*u0 + c, whose order on r is the union of the orders of u and u0.
/// The instance is needed to check the 0-compatibility hypothesis.
inline UtilityExpr combine_utilities(const Instance& r, const UtilityExpr& u, const UtilityExpr& u0,
                                     const Rational& a, const Rational& b, const Rational& c)
{
    if (a <= 0 || b <= 0)
        throw Error("utility coefficients a and b must be positive");
    const FinitePreference fu = utility_pref(r, u);
    const FinitePreference fu0 = utility_pref(r, u0);
    if (!finite_compatible(fu, fu0, 0))
        throw NotZeroCompatible();
    UtilityExpr combined = UtilityExpr::affine(u, a, u0, b, c);
    if (!(utility_pref(r, combined) == compose_edgewise(fu0, fu, Composition::Union)))
        throw std::logic_error("combined utility does not induce the union order");
    return combined;
}

/// Orders each u-indifference class of r by u0.
inline FinitePreference hidden_refinement(const Instance& r, const UtilityExpr& u, const UtilityExpr& u0)
{
    u.validate(r.schema());
    u0.validate(r.schema());
    FinitePreference f(r);
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
            f.set(i, j, u.eval(r[i], r.schema()) == u.eval(r[j], r.schema()) &&
                            u0.eval(r[i], r.schema()) > u0.eval(r[j], r.schema()));
    if (!finite_compatible(utility_pref(r, u), f, 0))
        throw std::logic_error("hidden refinement conflicts with the utility order");
    return f;
}

/// Schema of a stored preference: every attribute twice, suffixed ".l" and ".r".
inline Schema stored_schema(const Schema& base)
{
    std::vector<Attribute> attrs;
    for (const auto& a : base)
        attrs.push_back({a.name + ".l", a.sort});
    for (const auto& a : base)
        attrs.push_back({a.name + ".r", a.sort});
    return Schema(std::move(attrs));
}

namespace detail {

inline std::vector<std::pair<Tuple, Tuple>> split_edges(const Instance& edges, const Schema& base)
{
    if (!(edges.schema() == stored_schema(base)))
        throw SchemaMismatch("stored preference schema (" + edges.schema().to_string() + ") is not (" +
                             stored_schema(base).to_string() + ")");
    const std::size_t k = base.size();
    std::vector<std::pair<Tuple, Tuple>> out;
    for (const auto& t : edges.tuples())
        out.emplace_back(Tuple(t.begin(), t.begin() + k), Tuple(t.begin() + k, t.end()));
    return out;
}

} // namespace detail

/// A stored preference over the tuples it mentions.
inline FinitePreference stored_pref(const Instance& edges, const Schema& base)
{
    auto pairs = detail::split_edges(edges, base);
    std::vector<Tuple> nodes;
    std::unordered_map<Tuple, bool, TupleHash> seen;
    for (const auto& [t, s] : pairs)
        for (const Tuple* u : {&t, &s})
            if (seen.emplace(*u, true).second)
                nodes.push_back(*u);
    return FinitePreference(Instance(edges.name(), base, std::move(nodes)), pairs);
}

/// A stored preference restricted to the tuples of r.
inline FinitePreference stored_pref(const Instance& edges, const Instance& r)
{
    FinitePreference f(r);
    for (const auto& [t, s] : detail::split_edges(edges, r.schema()))
        if (r.contains(t) && r.contains(s))
            f.add(t, s);
    return f;
}

inline Instance load_stored_csv(std::istream& in, const Schema& base, std::string name = "pref")
{
    return load_csv(in, stored_schema(base), std::move(name));
}

} // namespace prefq

#endif // PREFQ_RESTRICTION_HPP_
