#ifndef PREFQ_VALUE_HPP_
#define PREFQ_VALUE_HPP_

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace prefq {

/// D holds uninterpreted constants, Q the rationals.
enum class Sort
{
    D,
    Q
};

inline std::string_view sort_name(Sort s) { return s == Sort::D ? "str" : "rat"; }

using Rational = mpq_class;

/// Parses an exact rational: optional sign, then a decimal ("12", "-0.25")
/// or a fraction ("3/4", "-7/2").
inline std::optional<Rational> parse_rational(std::string_view text)
{
    if (text.empty())
        return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (text[0] == '+' || text[0] == '-')
    {
        negative = text[0] == '-';
        ++i;
    }
    auto digits = [&](std::size_t from) {
        std::size_t j = from;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
            ++j;
        return j;
    };
    std::size_t end_int = digits(i);
    if (end_int == i)
        return std::nullopt;
    std::string int_part(text.substr(i, end_int - i));
    Rational value;
    if (end_int == text.size())
    {
        value = Rational(mpz_class(int_part, 10));
    }
    else if (text[end_int] == '/')
    {
        std::size_t end_den = digits(end_int + 1);
        if (end_den == end_int + 1 || end_den != text.size())
            return std::nullopt;
        mpz_class den(std::string(text.substr(end_int + 1)), 10);
        if (den == 0)
            return std::nullopt;
        value = Rational(mpz_class(int_part, 10), den);
        value.canonicalize();
    }
    else if (text[end_int] == '.')
    {
        std::size_t end_frac = digits(end_int + 1);
        if (end_frac == end_int + 1 || end_frac != text.size())
            return std::nullopt;
        std::string frac(text.substr(end_int + 1));
        mpz_class scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
        value = Rational(mpz_class(int_part + frac, 10), scale);
        value.canonicalize();
    }
    else
    {
        return std::nullopt;
    }
    if (negative)
        value = -value;
    return value;
}

/// Integers print plainly, everything else as "p/q".
inline std::string format_rational(Rational q)
{
    q.canonicalize();
    if (q.get_den() == 1)
        return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// A ground attribute value: a D constant or an exact rational.
class Value
{
  public:
    Value() : data_(std::string{}) {}
    static Value text(std::string s) { return Value(Data(std::move(s))); }
    static Value rational(Rational q)
    {
        q.canonicalize();
        return Value(Data(std::move(q)));
    }

    Sort sort() const noexcept { return data_.index() == 0 ? Sort::D : Sort::Q; }
    bool is_text() const noexcept { return data_.index() == 0; }
    const std::string& as_text() const { return std::get<0>(data_); }
    const Rational& as_rational() const { return std::get<1>(data_); }

    /// Plain rendering, as used in CSV cells.
    std::string str() const { return is_text() ? as_text() : format_rational(as_rational()); }

    /// Rendering as a DSL literal ('VW', 2002, 3/2).
    std::string literal() const
    {
        if (!is_text())
            return format_rational(as_rational());
        std::string out = "'";
        for (char c : as_text())
        {
            if (c == '\'')
                out += '\'';
            out += c;
        }
        return out + "'";
    }

    friend bool operator==(const Value& a, const Value& b)
    {
        if (a.data_.index() != b.data_.index())
            return false;
        return a.is_text() ? a.as_text() == b.as_text() : a.as_rational() == b.as_rational();
    }

    /// D values sort before Q values; D lexicographically, Q numerically.
    friend std::strong_ordering operator<=>(const Value& a, const Value& b)
    {
        if (a.data_.index() != b.data_.index())
            return a.data_.index() <=> b.data_.index();
        if (a.is_text())
            return a.as_text().compare(b.as_text()) <=> 0;
        return cmp(a.as_rational(), b.as_rational()) <=> 0;
    }

    std::size_t hash() const
    {
        if (is_text())
            return std::hash<std::string>{}(as_text());
        return std::hash<std::string>{}(format_rational(as_rational())) ^ 0x9e3779b97f4a7c15ULL;
    }

  private:
    using Data = std::variant<std::string, Rational>;
    explicit Value(Data d) : data_(std::move(d)) {}
    Data data_;
};

/// A ground tuple; arity and sorts are checked against a Schema by callers.
using Tuple = std::vector<Value>;

struct TupleHash
{
    std::size_t operator()(const Tuple& t) const
    {
        std::size_t h = t.size();
        for (const auto& v : t)
            h = h * 1000003u ^ v.hash();
        return h;
    }
};

inline std::string tuple_str(const Tuple& t)
{
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        if (i)
            out += ", ";
        out += t[i].literal();
    }
    return out + ")";
}

} // namespace prefq

#endif // PREFQ_VALUE_HPP_
