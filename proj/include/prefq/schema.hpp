#ifndef PREFQ_SCHEMA_HPP_
#define PREFQ_SCHEMA_HPP_

#include "prefq/errors.hpp"
#include "prefq/value.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prefq {

struct Attribute
{
    std::string name;
    Sort sort = Sort::D;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered, nonempty list of uniquely named, sorted attributes.
class Schema
{
  public:
    Schema() = default;

    explicit Schema(std::vector<Attribute> attributes) : attributes_(std::move(attributes))
    {
        if (attributes_.empty())
            throw TypeError("schema must have at least one attribute");
        for (std::size_t i = 0; i < attributes_.size(); ++i)
        {
            if (attributes_[i].name.empty())
                throw TypeError("empty attribute name");
            for (std::size_t j = 0; j < i; ++j)
                if (attributes_[j].name == attributes_[i].name)
                    throw TypeError("duplicate attribute '" + attributes_[i].name + "'");
        }
    }

    std::size_t size() const noexcept { return attributes_.size(); }
    bool empty() const noexcept { return attributes_.empty(); }
    const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }
    auto begin() const { return attributes_.begin(); }
    auto end() const { return attributes_.end(); }

    std::optional<std::size_t> index_of(std::string_view name) const
    {
        for (std::size_t i = 0; i < attributes_.size(); ++i)
            if (attributes_[i].name == name)
                return i;
        return std::nullopt;
    }

    /// "make:str, year:rat"
    std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < attributes_.size(); ++i)
        {
            if (i)
                out += ", ";
            out += attributes_[i].name;
            out += ':';
            out += sort_name(attributes_[i].sort);
        }
        return out;
    }

    friend bool operator==(const Schema&, const Schema&) = default;

  private:
    std::vector<Attribute> attributes_;
};

inline std::optional<Sort> parse_sort(std::string_view word)
{
    std::string w(word);
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (w == "str" || w == "d" || w == "text" || w == "string")
        return Sort::D;
    if (w == "rat" || w == "q" || w == "num" || w == "rational")
        return Sort::Q;
    return std::nullopt;
}

/// Parses "make:str, year:rat" (surrounding parentheses optional).
inline Schema parse_schema(std::string_view text)
{
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            s.remove_suffix(1);
        return s;
    };
    text = trim(text);
    if (!text.empty() && text.front() == '(')
    {
        if (text.back() != ')')
            throw TypeError("unbalanced parentheses in schema");
        text = trim(text.substr(1, text.size() - 2));
    }
    std::vector<Attribute> attrs;
    while (!text.empty())
    {
        std::size_t comma = text.find(',');
        std::string_view item = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        std::size_t colon = item.find(':');
        if (colon == std::string_view::npos)
            throw TypeError("attribute '" + std::string(item) + "' lacks a sort");
        auto sort = parse_sort(trim(item.substr(colon + 1)));
        if (!sort)
            throw TypeError("unknown sort in '" + std::string(item) + "'");
        attrs.push_back({std::string(trim(item.substr(0, colon))), *sort});
    }
    return Schema(std::move(attrs));
}

} // namespace prefq

#endif // PREFQ_SCHEMA_HPP_
