#ifndef PREFQ_FORMULA_HPP_
#define PREFQ_FORMULA_HPP_

#include "prefq/schema.hpp"
#include "prefq/value.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace prefq {

/// Tuple variables are small integers. X (preferred side) and Y (dominated
/// side) are the two free variables of a preference formula; larger indices
/// are auxiliary variables introduced by joins and rule bodies.
using VarId = int;
inline constexpr VarId kVarX = 0;
inline constexpr VarId kVarY = 1;

inline std::string var_name(VarId v)
{
    static const char* names[] = {"x", "y", "z", "w", "u", "v"};
    if (v >= 0 && v < 6)
        return names[v];
    return "t" + std::to_string(v);
}

/// Either an attribute of a tuple variable or a constant.
struct Term
{
    bool constant = false;
    VarId var = 0;
    std::size_t attr = 0;
    Value value;

    static Term attribute(VarId v, std::size_t a)
    {
        Term t;
        t.var = v;
        t.attr = a;
        return t;
    }
    static Term literal(Value v)
    {
        Term t;
        t.constant = true;
        t.value = std::move(v);
        return t;
    }

    friend bool operator==(const Term& a, const Term& b)
    {
        if (a.constant != b.constant)
            return false;
        return a.constant ? a.value == b.value : (a.var == b.var && a.attr == b.attr);
    }

    // Attribute terms order before constants.
    friend std::strong_ordering operator<=>(const Term& a, const Term& b)
    {
        if (a.constant != b.constant)
            return a.constant ? std::strong_ordering::greater : std::strong_ordering::less;
        if (a.constant)
            return a.value <=> b.value;
        if (auto c = a.var <=> b.var; c != 0)
            return c;
        return a.attr <=> b.attr;
    }

    std::string str(const Schema& schema) const
    {
        if (constant)
            return value.literal();
        return var_name(var) + "." + schema[attr].name;
    }
};

enum class Cmp
{
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge
};

inline const char* cmp_symbol(Cmp c)
{
    switch (c)
    {
    case Cmp::Eq: return "=";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
    }
    return "?";
}

inline Cmp cmp_complement(Cmp c)
{
    switch (c)
    {
    case Cmp::Eq: return Cmp::Ne;
    case Cmp::Ne: return Cmp::Eq;
    case Cmp::Lt: return Cmp::Ge;
    case Cmp::Le: return Cmp::Gt;
    case Cmp::Gt: return Cmp::Le;
    case Cmp::Ge: return Cmp::Lt;
    }
    return c;
}

// The comparator obtained by swapping operands.
inline Cmp cmp_mirror(Cmp c)
{
    switch (c)
    {
    case Cmp::Lt: return Cmp::Gt;
    case Cmp::Le: return Cmp::Ge;
    case Cmp::Gt: return Cmp::Lt;
    case Cmp::Ge: return Cmp::Le;
    default: return c;
    }
}

inline bool cmp_holds(Cmp c, std::strong_ordering o)
{
    switch (c)
    {
    case Cmp::Eq: return o == 0;
    case Cmp::Ne: return o != 0;
    case Cmp::Lt: return o < 0;
    case Cmp::Le: return o <= 0;
    case Cmp::Gt: return o > 0;
    case Cmp::Ge: return o >= 0;
    }
    return false;
}

struct Atom
{
    Term lhs;
    Cmp op = Cmp::Eq;
    Term rhs;
    Sort sort = Sort::D;

    friend bool operator==(const Atom&, const Atom&) = default;
    friend std::strong_ordering operator<=>(const Atom& a, const Atom& b)
    {
        if (auto c = a.lhs <=> b.lhs; c != 0)
            return c;
        if (auto c = a.rhs <=> b.rhs; c != 0)
            return c;
        return a.op <=> b.op;
    }

    Atom complement() const { return Atom{lhs, cmp_complement(op), rhs, sort}; }

    std::string str(const Schema& schema) const
    {
        return lhs.str(schema) + " " + cmp_symbol(op) + " " + rhs.str(schema);
    }
};

/// Result of canonicalizing an atom: it may collapse to a truth value.
enum class Truth
{
    False,
    True,
    Open
};

/// Orders operands (attribute terms first) and evaluates ground or
/// reflexive atoms. Returns Open with the canonical atom in `out` otherwise.
inline Truth canonicalize(const Atom& in, Atom& out)
{
    if (in.lhs.constant && in.rhs.constant)
        return cmp_holds(in.op, in.lhs.value <=> in.rhs.value) ? Truth::True : Truth::False;
    if (in.lhs == in.rhs)
        return cmp_holds(in.op, std::strong_ordering::equal) ? Truth::True : Truth::False;
    out = in;
    if (in.rhs < in.lhs)
    {
        std::swap(out.lhs, out.rhs);
        out.op = cmp_mirror(in.op);
    }
    return Truth::Open;
}

template <typename F>
Term rename_term(const Term& t, F&& map)
{
    if (t.constant)
        return t;
    return Term::attribute(map(t.var), t.attr);
}

/// A conjunction of canonical atoms, kept sorted and duplicate-free.
struct Conjunction
{
    std::vector<Atom> atoms;

    Conjunction() = default;
    explicit Conjunction(std::vector<Atom> a) : atoms(std::move(a)) { normalize_order(); }

    void normalize_order()
    {
        std::sort(atoms.begin(), atoms.end());
        atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    }

    bool empty() const noexcept { return atoms.empty(); }
    std::size_t size() const noexcept { return atoms.size(); }

    std::set<VarId> free_vars() const
    {
        std::set<VarId> vs;
        for (const auto& a : atoms)
        {
            if (!a.lhs.constant)
                vs.insert(a.lhs.var);
            if (!a.rhs.constant)
                vs.insert(a.rhs.var);
        }
        return vs;
    }

    /// Syntactic containment of atom sets.
    bool includes(const Conjunction& other) const
    {
        return std::includes(atoms.begin(), atoms.end(), other.atoms.begin(), other.atoms.end());
    }

    std::string str(const Schema& schema) const
    {
        if (atoms.empty())
            return "TRUE";
        std::string out;
        for (std::size_t i = 0; i < atoms.size(); ++i)
        {
            if (i)
                out += " AND ";
            out += atoms[i].str(schema);
        }
        return out;
    }

    friend bool operator==(const Conjunction&, const Conjunction&) = default;
    friend auto operator<=>(const Conjunction& a, const Conjunction& b)
    {
        return std::lexicographical_compare_three_way(a.atoms.begin(), a.atoms.end(),
                                                      b.atoms.begin(), b.atoms.end());
    }
};

using Dnf = std::vector<Conjunction>;

/// Renames variables; nullopt if an atom becomes trivially false.
template <typename F>
std::optional<Conjunction> rename(const Conjunction& c, F&& map)
{
    std::vector<Atom> atoms;
    atoms.reserve(c.atoms.size());
    for (const auto& a : c.atoms)
    {
        Atom r{rename_term(a.lhs, map), a.op, rename_term(a.rhs, map), a.sort};
        Atom canon;
        switch (canonicalize(r, canon))
        {
        case Truth::True: break;
        case Truth::False: return std::nullopt;
        case Truth::Open: atoms.push_back(canon); break;
        }
    }
    return Conjunction(std::move(atoms));
}

inline std::string dnf_str(const Dnf& d, const Schema& schema)
{
    if (d.empty())
        return "FALSE";
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i)
    {
        if (i)
            out += " OR ";
        out += d[i].str(schema);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Boolean formula trees.

class Node;
using Formula = std::shared_ptr<const Node>;

class Node
{
  public:
    enum class Kind
    {
        True,
        False,
        Atom,
        And,
        Or,
        Not
    };

    Kind kind() const noexcept { return kind_; }
    const prefq::Atom& atom() const { return atom_; }
    const std::vector<Formula>& children() const noexcept { return children_; }

    Node(Kind k, prefq::Atom a, std::vector<Formula> ch)
        : kind_(k), atom_(std::move(a)), children_(std::move(ch))
    {
    }

  private:
    Kind kind_;
    prefq::Atom atom_;
    std::vector<Formula> children_;
};

inline Formula f_true()
{
    static const Formula t = std::make_shared<const Node>(Node::Kind::True, Atom{}, std::vector<Formula>{});
    return t;
}

inline Formula f_false()
{
    static const Formula f = std::make_shared<const Node>(Node::Kind::False, Atom{}, std::vector<Formula>{});
    return f;
}

inline Formula f_atom(const Atom& a)
{
    Atom canon;
    switch (canonicalize(a, canon))
    {
    case Truth::True: return f_true();
    case Truth::False: return f_false();
    case Truth::Open: break;
    }
    return std::make_shared<const Node>(Node::Kind::Atom, canon, std::vector<Formula>{});
}

namespace detail {

inline Formula make_junction(Node::Kind kind, std::vector<Formula> parts)
{
    const Node::Kind unit = kind == Node::Kind::And ? Node::Kind::True : Node::Kind::False;
    const Node::Kind zero = kind == Node::Kind::And ? Node::Kind::False : Node::Kind::True;
    std::vector<Formula> flat;
    for (auto& p : parts)
    {
        if (p->kind() == unit)
            continue;
        if (p->kind() == zero)
            return p;
        if (p->kind() == kind)
            flat.insert(flat.end(), p->children().begin(), p->children().end());
        else
            flat.push_back(std::move(p));
    }
    if (flat.empty())
        return kind == Node::Kind::And ? f_true() : f_false();
    if (flat.size() == 1)
        return flat.front();
    return std::make_shared<const Node>(kind, Atom{}, std::move(flat));
}

} // namespace detail

inline Formula f_and(std::vector<Formula> parts) { return detail::make_junction(Node::Kind::And, std::move(parts)); }
inline Formula f_or(std::vector<Formula> parts) { return detail::make_junction(Node::Kind::Or, std::move(parts)); }

inline Formula f_not(Formula f)
{
    switch (f->kind())
    {
    case Node::Kind::True: return f_false();
    case Node::Kind::False: return f_true();
    case Node::Kind::Not: return f->children().front();
    default: break;
    }
    return std::make_shared<const Node>(Node::Kind::Not, Atom{}, std::vector<Formula>{std::move(f)});
}

inline Formula from_conjunction(const Conjunction& c)
{
    std::vector<Formula> parts;
    for (const auto& a : c.atoms)
        parts.push_back(f_atom(a));
    return f_and(std::move(parts));
}

inline Formula from_dnf(const Dnf& d)
{
    std::vector<Formula> parts;
    for (const auto& c : d)
        parts.push_back(from_conjunction(c));
    return f_or(std::move(parts));
}

template <typename F>
Formula rename(const Formula& f, F&& map)
{
    switch (f->kind())
    {
    case Node::Kind::True:
    case Node::Kind::False: return f;
    case Node::Kind::Atom:
    {
        const Atom& a = f->atom();
        return f_atom(Atom{rename_term(a.lhs, map), a.op, rename_term(a.rhs, map), a.sort});
    }
    case Node::Kind::Not: return f_not(rename(f->children().front(), map));
    case Node::Kind::And:
    case Node::Kind::Or:
    {
        std::vector<Formula> parts;
        for (const auto& c : f->children())
            parts.push_back(rename(c, map));
        return f->kind() == Node::Kind::And ? f_and(std::move(parts)) : f_or(std::move(parts));
    }
    }
    return f;
}

/// Pushes negation down to atoms by comparator complementation.
inline Formula nnf(const Formula& f, bool negate = false)
{
    switch (f->kind())
    {
    case Node::Kind::True: return negate ? f_false() : f_true();
    case Node::Kind::False: return negate ? f_true() : f_false();
    case Node::Kind::Atom: return negate ? f_atom(f->atom().complement()) : f;
    case Node::Kind::Not: return nnf(f->children().front(), !negate);
    case Node::Kind::And:
    case Node::Kind::Or:
    {
        std::vector<Formula> parts;
        for (const auto& c : f->children())
            parts.push_back(nnf(c, negate));
        const bool conj = (f->kind() == Node::Kind::And) != negate;
        return conj ? f_and(std::move(parts)) : f_or(std::move(parts));
    }
    }
    return f;
}

inline std::string formula_str(const Formula& f, const Schema& schema, int parent_prec = 0)
{
    switch (f->kind())
    {
    case Node::Kind::True: return "TRUE";
    case Node::Kind::False: return "FALSE";
    case Node::Kind::Atom: return f->atom().str(schema);
    case Node::Kind::Not: return "NOT (" + formula_str(f->children().front(), schema, 0) + ")";
    case Node::Kind::And:
    case Node::Kind::Or:
    {
        const bool conj = f->kind() == Node::Kind::And;
        const int prec = conj ? 2 : 1;
        std::string out;
        for (std::size_t i = 0; i < f->children().size(); ++i)
        {
            if (i)
                out += conj ? " AND " : " OR ";
            out += formula_str(f->children()[i], schema, prec);
        }
        return prec < parent_prec ? "(" + out + ")" : out;
    }
    }
    return "";
}

inline void collect_vars(const Formula& f, std::set<VarId>& out)
{
    if (f->kind() == Node::Kind::Atom)
    {
        if (!f->atom().lhs.constant)
            out.insert(f->atom().lhs.var);
        if (!f->atom().rhs.constant)
            out.insert(f->atom().rhs.var);
    }
    for (const auto& c : f->children())
        collect_vars(c, out);
}

inline void collect_constants(const Formula& f, std::set<Value>& out)
{
    if (f->kind() == Node::Kind::Atom)
    {
        if (f->atom().lhs.constant)
            out.insert(f->atom().lhs.value);
        if (f->atom().rhs.constant)
            out.insert(f->atom().rhs.value);
    }
    for (const auto& c : f->children())
        collect_constants(c, out);
}

} // namespace prefq

#endif // PREFQ_FORMULA_HPP_
