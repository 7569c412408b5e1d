#ifndef PREFQ_PREFERENCE_FORMULA_HPP_
#define PREFQ_PREFERENCE_FORMULA_HPP_

#include "prefq/dnf.hpp"
#include "prefq/errors.hpp"
#include "prefq/formula.hpp"
#include "prefq/sat.hpp"

#include <set>
#include <string>
#include <vector>

namespace prefq {

/// A quantifier-free ERO formula over the tuple variables X and Y, together
/// with its normalized DNF. Immutable.
class PreferenceFormula
{
  public:
    PreferenceFormula() = default;

    PreferenceFormula(Schema schema, Formula body) : schema_(std::move(schema)), body_(std::move(body))
    {
        check_vars(body_);
        dnf_ = to_dnf(body_);
    }

    static PreferenceFormula from_dnf(Schema schema, Dnf dnf)
    {
        PreferenceFormula f;
        f.schema_ = std::move(schema);
        f.dnf_ = normalize_dnf(std::move(dnf));
        f.body_ = prefq::from_dnf(f.dnf_);
        check_vars(f.body_);
        return f;
    }

    static PreferenceFormula empty(Schema schema) { return from_dnf(std::move(schema), {}); }

    const Schema& schema() const noexcept { return schema_; }
    const Formula& body() const noexcept { return body_; }
    const Dnf& dnf() const noexcept { return dnf_; }

    /// The DNF rendered in the formula DSL; parses back to an equivalent formula.
    std::string str() const { return dnf_str(dnf_, schema_); }

    /// The formula with X renamed to `a` and Y to `b`.
    Formula instantiate(VarId a, VarId b) const
    {
        auto map = [a, b](VarId v) { return v == kVarX ? a : b; };
        Dnf renamed;
        for (const auto& c : dnf_)
            if (auto r = rename(c, map))
                renamed.push_back(std::move(*r));
        return prefq::from_dnf(renamed);
    }

  private:
    static void check_vars(const Formula& f)
    {
        std::set<VarId> vs;
        collect_vars(f, vs);
        for (VarId v : vs)
            if (v != kVarX && v != kVarY)
                throw TypeError("preference formulas may only mention x and y");
    }

    Schema schema_;
    Formula body_ = f_false();
    Dnf dnf_;
};

inline void require_same_schema(const Schema& a, const Schema& b)
{
    if (!(a == b))
        throw SchemaMismatch("schemas differ: (" + a.to_string() + ") vs (" + b.to_string() + ")");
}

inline bool conforms(const Tuple& t, const Schema& s)
{
    if (t.size() != s.size())
        return false;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].sort() != s[i].sort)
            return false;
    return true;
}

/// Evaluates `f` with tuple variable i bound to bindings[i].
inline bool eval_formula(const Formula& f, const std::vector<const Tuple*>& bindings)
{
    auto value = [&](const Term& t) -> const Value& {
        return t.constant ? t.value : (*bindings.at(static_cast<std::size_t>(t.var)))[t.attr];
    };
    switch (f->kind())
    {
    case Node::Kind::True: return true;
    case Node::Kind::False: return false;
    case Node::Kind::Atom:
        return eval_atom(f->atom(), value(f->atom().lhs), value(f->atom().rhs));
    case Node::Kind::Not: return !eval_formula(f->children().front(), bindings);
    case Node::Kind::And:
        for (const auto& c : f->children())
            if (!eval_formula(c, bindings))
                return false;
        return true;
    case Node::Kind::Or:
        for (const auto& c : f->children())
            if (eval_formula(c, bindings))
                return true;
        return false;
    }
    return false;
}

inline bool eval_conjunction(const Conjunction& c, const std::vector<const Tuple*>& bindings)
{
    auto value = [&](const Term& t) -> const Value& {
        return t.constant ? t.value : (*bindings.at(static_cast<std::size_t>(t.var)))[t.attr];
    };
    for (const auto& a : c.atoms)
        if (!eval_atom(a, value(a.lhs), value(a.rhs)))
            return false;
    return true;
}

inline bool eval_dnf(const Dnf& d, const std::vector<const Tuple*>& bindings)
{
    for (const auto& c : d)
        if (eval_conjunction(c, bindings))
            return true;
    return false;
}

/// Ground evaluation: does tX dominate tY?
inline bool eval_ground(const PreferenceFormula& f, const Tuple& tx, const Tuple& ty)
{
    return eval_dnf(f.dnf(), {&tx, &ty});
}

inline bool is_satisfiable(const PreferenceFormula& f) { return !f.dnf().empty(); }

inline bool implies(const PreferenceFormula& f, const PreferenceFormula& g)
{
    require_same_schema(f.schema(), g.schema());
    const Formula not_g = nnf(f_not(from_dnf(g.dnf())));
    for (const auto& c : f.dnf())
        if (is_satisfiable(f_and({from_conjunction(c), not_g})))
            return false;
    return true;
}

inline bool equivalent(const PreferenceFormula& f, const PreferenceFormula& g)
{
    return implies(f, g) && implies(g, f);
}

} // namespace prefq

#endif // PREFQ_PREFERENCE_FORMULA_HPP_
