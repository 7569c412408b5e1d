#ifndef PREFQ_ALGEBRA_HPP_
#define PREFQ_ALGEBRA_HPP_

#include "prefq/dnf.hpp"
#include "prefq/preference_formula.hpp"
#include "prefq/sat.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

/// A named preference relation defined by an ERO formula.
class PreferenceRelation
{
  public:
    PreferenceRelation() = default;
    PreferenceRelation(std::string name, PreferenceFormula formula)
        : name_(std::move(name)), formula_(std::move(formula))
    {
    }

    const std::string& name() const noexcept { return name_; }
    const PreferenceFormula& formula() const noexcept { return formula_; }
    const Schema& schema() const noexcept { return formula_.schema(); }
    const Dnf& dnf() const noexcept { return formula_.dnf(); }

    /// The relation's formula with X and Y renamed to `a` and `b`.
    Formula at(VarId a, VarId b) const { return formula_.instantiate(a, b); }

    PreferenceRelation renamed(std::string name) const { return {std::move(name), formula_}; }

  private:
    std::string name_;
    PreferenceFormula formula_;
};

enum class Composition
{
    Union,
    Prioritized,
    Pareto
};

inline std::string_view composition_name(Composition c)
{
    switch (c)
    {
    case Composition::Union: return "union";
    case Composition::Prioritized: return "prioritized";
    case Composition::Pareto: return "pareto";
    }
    return "?";
}

inline std::optional<Composition> parse_composition(std::string_view s)
{
    std::string w(s);
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (w == "union")
        return Composition::Union;
    if (w == "prioritized" || w == "prior" || w == "priority")
        return Composition::Prioritized;
    if (w == "pareto")
        return Composition::Pareto;
    return std::nullopt;
}

/// Union, prioritized (p wins conflicts) or Pareto composition of two
/// relations over one schema.
inline PreferenceRelation compose(const PreferenceRelation& p, const PreferenceRelation& q, Composition op,
                                  std::string name = {})
{
    require_same_schema(p.schema(), q.schema());
    Formula body;
    switch (op)
    {
    case Composition::Union: body = f_or({p.at(kVarX, kVarY), q.at(kVarX, kVarY)}); break;
    case Composition::Prioritized:
        body = f_or({p.at(kVarX, kVarY), f_and({f_not(p.at(kVarY, kVarX)), q.at(kVarX, kVarY)})});
        break;
    case Composition::Pareto:
        body = f_or({f_and({p.at(kVarX, kVarY), f_not(q.at(kVarY, kVarX))}),
                     f_and({q.at(kVarX, kVarY), f_not(p.at(kVarY, kVarX))})});
        break;
    }
    if (name.empty())
        name = "(" + p.name() + " " + std::string(composition_name(op)) + " " + q.name() + ")";
    return {std::move(name), PreferenceFormula::from_dnf(p.schema(), to_dnf(body))};
}

inline PreferenceRelation inverse(const PreferenceRelation& p)
{
    return {p.name() + "^-1", PreferenceFormula::from_dnf(p.schema(), to_dnf(p.at(kVarY, kVarX)))};
}

/// Neither tuple is preferred to the other.
inline PreferenceFormula indifference(const PreferenceRelation& p)
{
    return PreferenceFormula::from_dnf(
        p.schema(), to_dnf(f_and({f_not(p.at(kVarX, kVarY)), f_not(p.at(kVarY, kVarX))})));
}

enum class OrderProperty
{
    Irreflexive,
    Transitive,
    NegativelyTransitive,
    Connected,
    SPO,
    IO,
    WO,
    TotalOrder
};

inline std::string_view property_name(OrderProperty p)
{
    switch (p)
    {
    case OrderProperty::Irreflexive: return "irreflexive";
    case OrderProperty::Transitive: return "transitive";
    case OrderProperty::NegativelyTransitive: return "negtransitive";
    case OrderProperty::Connected: return "connected";
    case OrderProperty::SPO: return "spo";
    case OrderProperty::IO: return "io";
    case OrderProperty::WO: return "wo";
    case OrderProperty::TotalOrder: return "total";
    }
    return "?";
}

inline std::optional<OrderProperty> parse_property(std::string_view s)
{
    std::string w(s);
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    w.erase(std::remove(w.begin(), w.end(), '_'), w.end());
    w.erase(std::remove(w.begin(), w.end(), '-'), w.end());
    if (w == "irreflexive" || w == "irr")
        return OrderProperty::Irreflexive;
    if (w == "transitive" || w == "trans")
        return OrderProperty::Transitive;
    if (w == "negtransitive" || w == "negativelytransitive" || w == "negtrans")
        return OrderProperty::NegativelyTransitive;
    if (w == "connected")
        return OrderProperty::Connected;
    if (w == "spo")
        return OrderProperty::SPO;
    if (w == "io" || w == "intervalorder")
        return OrderProperty::IO;
    if (w == "wo" || w == "weakorder")
        return OrderProperty::WO;
    if (w == "total" || w == "totalorder" || w == "to")
        return OrderProperty::TotalOrder;
    return std::nullopt;
}

namespace detail {

inline constexpr VarId kVarZ = 2;
inline constexpr VarId kVarW = 3;

// Each property is the unsatisfiability of a quantifier-free formula over
// up to four tuple variables.
inline bool refutes(const Formula& counterexample) { return !is_satisfiable(counterexample); }

inline bool irreflexive(const PreferenceRelation& p) { return refutes(p.at(kVarX, kVarX)); }

inline bool transitive(const PreferenceRelation& p)
{
    return refutes(f_and({p.at(kVarX, kVarZ), p.at(kVarZ, kVarY), f_not(p.at(kVarX, kVarY))}));
}

inline bool negatively_transitive(const PreferenceRelation& p)
{
    return refutes(f_and({f_not(p.at(kVarX, kVarZ)), f_not(p.at(kVarZ, kVarY)), p.at(kVarX, kVarY)}));
}

inline bool connected(const PreferenceRelation& p)
{
    std::vector<Formula> differs;
    for (std::size_t a = 0; a < p.schema().size(); ++a)
        differs.push_back(f_atom(Atom{Term::attribute(kVarX, a), Cmp::Ne, Term::attribute(kVarY, a),
                                      p.schema()[a].sort}));
    return refutes(f_and({f_not(p.at(kVarX, kVarY)), f_not(p.at(kVarY, kVarX)), f_or(differs)}));
}

inline bool interval_condition(const PreferenceRelation& p)
{
    return refutes(f_and({p.at(kVarX, kVarY), p.at(kVarZ, kVarW), f_not(p.at(kVarX, kVarW)),
                          f_not(p.at(kVarZ, kVarY))}));
}

} // namespace detail

/// Decides an order-theoretic property over the infinite domain.
inline bool check_property(const PreferenceRelation& p, OrderProperty prop)
{
    using namespace detail;
    switch (prop)
    {
    case OrderProperty::Irreflexive: return irreflexive(p);
    case OrderProperty::Transitive: return transitive(p);
    case OrderProperty::NegativelyTransitive: return negatively_transitive(p);
    case OrderProperty::Connected: return connected(p);
    case OrderProperty::SPO: return irreflexive(p) && transitive(p);
    case OrderProperty::IO: return irreflexive(p) && transitive(p) && interval_condition(p);
    case OrderProperty::WO: return irreflexive(p) && transitive(p) && negatively_transitive(p);
    case OrderProperty::TotalOrder: return connected(p) && irreflexive(p) && transitive(p);
    }
    return false;
}

/// p contains q: every pair q prefers, p prefers too.
inline bool contains(const PreferenceRelation& p, const PreferenceRelation& q)
{
    return implies(q.formula(), p.formula());
}

inline bool equivalent(const PreferenceRelation& p, const PreferenceRelation& q)
{
    return equivalent(p.formula(), q.formula());
}

} // namespace prefq

#endif // PREFQ_ALGEBRA_HPP_
