#ifndef PREFQ_INSTANCE_HPP_
#define PREFQ_INSTANCE_HPP_

#include "prefq/errors.hpp"
#include "prefq/preference_formula.hpp"
#include "prefq/schema.hpp"
#include "prefq/value.hpp"

#include <cstddef>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace prefq {

/// A finite, duplicate-free, ordered set of tuples over one schema.
class Instance
{
  public:
    Instance() = default;

    /// Throws DuplicateTuple (0-based position) or TypeError.
    Instance(std::string name, Schema schema, std::vector<Tuple> tuples = {})
        : name_(std::move(name)), schema_(std::move(schema))
    {
        tuples_.reserve(tuples.size());
        for (std::size_t i = 0; i < tuples.size(); ++i)
        {
            if (!conforms(tuples[i], schema_))
                throw TypeError("tuple " + tuple_str(tuples[i]) + " does not conform to (" + schema_.to_string() +
                                ")");
            if (!index_.emplace(tuples[i], tuples_.size()).second)
                throw DuplicateTuple(i);
            tuples_.push_back(std::move(tuples[i]));
        }
    }

    const std::string& name() const noexcept { return name_; }
    const Schema& schema() const noexcept { return schema_; }
    const std::vector<Tuple>& tuples() const noexcept { return tuples_; }
    std::size_t size() const noexcept { return tuples_.size(); }
    bool empty() const noexcept { return tuples_.empty(); }
    const Tuple& operator[](std::size_t i) const { return tuples_[i]; }

    bool contains(const Tuple& t) const { return index_.count(t) != 0; }

    std::optional<std::size_t> index_of(const Tuple& t) const
    {
        auto it = index_.find(t);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    Instance renamed(std::string name) const
    {
        Instance out = *this;
        out.name_ = std::move(name);
        return out;
    }

    /// Same tuples, ignoring order and name.
    bool same_set(const Instance& other) const
    {
        if (size() != other.size())
            return false;
        for (const auto& t : tuples_)
            if (!other.contains(t))
                return false;
        return true;
    }

    friend bool operator==(const Instance& a, const Instance& b)
    {
        return a.name_ == b.name_ && a.schema_ == b.schema_ && a.tuples_ == b.tuples_;
    }

  private:
    std::string name_;
    Schema schema_;
    std::vector<Tuple> tuples_;
    std::unordered_map<Tuple, std::size_t, TupleHash> index_;
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;)
    {
        std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

// row/column are 1-based; row counts data rows after the header.
inline Value parse_cell(std::string_view raw, Sort sort, std::size_t row, std::size_t column)
{
    std::string_view cell = trim(raw);
    if (cell.find('"') != std::string_view::npos)
        throw ValueParseError(row, column, "quoted fields are not supported");
    if (sort == Sort::D)
    {
        if (cell.empty())
            throw ValueParseError(row, column, "empty str value");
        return Value::text(std::string(cell));
    }
    auto q = parse_rational(cell);
    if (!q)
        throw ValueParseError(row, column, "not a rational: '" + std::string(cell) + "'");
    return Value::rational(std::move(*q));
}

} // namespace detail

/// Reads a header row followed by data rows.
inline Instance load_csv(std::istream& in, const Schema& schema, std::string name = "r")
{
    std::string line;
    if (!std::getline(in, line))
        throw HeaderMismatch("missing header row; expected " + schema.to_string());
    auto header = detail::split_commas(line);
    bool header_ok = header.size() == schema.size();
    for (std::size_t i = 0; header_ok && i < header.size(); ++i)
        header_ok = detail::trim(header[i]) == schema[i].name;
    if (!header_ok)
        throw HeaderMismatch("header '" + std::string(detail::trim(line)) + "' does not match schema (" +
                             schema.to_string() + ")");
    std::vector<Tuple> rows;
    std::size_t row = 0;
    while (std::getline(in, line))
    {
        if (detail::trim(line).empty())
            continue;
        ++row;
        auto cells = detail::split_commas(line);
        if (cells.size() != schema.size())
            throw ValueParseError(row, std::min(cells.size(), schema.size()) + 1,
                                  "expected " + std::to_string(schema.size()) + " fields, got " +
                                      std::to_string(cells.size()));
        Tuple t;
        t.reserve(cells.size());
        for (std::size_t c = 0; c < cells.size(); ++c)
            t.push_back(detail::parse_cell(cells[c], schema[c].sort, row, c + 1));
        rows.push_back(std::move(t));
    }
    try
    {
        return Instance(std::move(name), schema, std::move(rows));
    }
    catch (const DuplicateTuple& e)
    {
        throw DuplicateTuple(e.row() + 1);
    }
}

inline Instance load_csv_text(std::string_view text, const Schema& schema, std::string name = "r")
{
    std::istringstream in{std::string(text)};
    return load_csv(in, schema, std::move(name));
}

inline std::string serialize_csv(const Instance& r)
{
    std::string out;
    for (std::size_t i = 0; i < r.schema().size(); ++i)
        out += (i ? "," : "") + r.schema()[i].name;
    out += '\n';
    for (const auto& t : r.tuples())
    {
        for (std::size_t i = 0; i < t.size(); ++i)
            out += (i ? "," : "") + t[i].str();
        out += '\n';
    }
    return out;
}

/// Parses "(VW, 2002)" or "('VW', 2002)" against a schema.
inline Tuple parse_tuple(std::string_view text, const Schema& schema)
{
    std::string_view s = detail::trim(text);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')')
        s = s.substr(1, s.size() - 2);
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        char c = s[i];
        if (quoted)
        {
            if (c == '\'' && i + 1 < s.size() && s[i + 1] == '\'')
            {
                cur += '\'';
                ++i;
            }
            else if (c == '\'')
            {
                quoted = false;
            }
            else
            {
                cur += c;
            }
        }
        else if (c == '\'')
        {
            quoted = true;
        }
        else if (c == ',')
        {
            cells.emplace_back(detail::trim(cur));
            cur.clear();
        }
        else
        {
            cur += c;
        }
    }
    if (quoted)
        throw ValueParseError(1, cells.size() + 1, "unterminated quote");
    cells.emplace_back(detail::trim(cur));
    if (cells.size() != schema.size())
        throw ValueParseError(1, cells.size(),
                              "tuple has " + std::to_string(cells.size()) + " values, schema has " +
                                  std::to_string(schema.size()));
    Tuple t;
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (schema[i].sort == Sort::D)
        {
            if (cells[i].empty())
                throw ValueParseError(1, i + 1, "empty str value");
            t.push_back(Value::text(cells[i]));
        }
        else
        {
            auto q = parse_rational(cells[i]);
            if (!q)
                throw ValueParseError(1, i + 1, "not a rational: '" + cells[i] + "'");
            t.push_back(Value::rational(std::move(*q)));
        }
    }
    return t;
}

/// (r - del) + ins, survivors first in their order, then new insertions.
inline Instance apply_update(const Instance& r, const std::vector<Tuple>& ins, const std::vector<Tuple>& del)
{
    Instance deleted("", r.schema(), {});
    {
        std::vector<Tuple> uniq;
        std::unordered_map<Tuple, bool, TupleHash> seen;
        for (const auto& t : del)
            if (seen.emplace(t, true).second)
                uniq.push_back(t);
        deleted = Instance("", r.schema(), std::move(uniq));
    }
    std::vector<Tuple> out;
    for (const auto& t : ins)
    {
        if (!conforms(t, r.schema()))
            throw TypeError("inserted tuple " + tuple_str(t) + " does not conform to (" + r.schema().to_string() +
                            ")");
        if (deleted.contains(t))
            throw OverlapError();
    }
    for (const auto& t : r.tuples())
        if (!deleted.contains(t))
            out.push_back(t);
    std::unordered_map<Tuple, bool, TupleHash> present;
    for (const auto& t : out)
        present.emplace(t, true);
    for (const auto& t : ins)
        if (present.emplace(t, true).second)
            out.push_back(t);
    return Instance(r.name(), r.schema(), std::move(out));
}

inline Instance set_union(const Instance& a, const Instance& b, std::string name = {})
{
    return apply_update(a, b.tuples(), {}).renamed(name.empty() ? a.name() : std::move(name));
}

inline Instance set_difference(const Instance& a, const Instance& b, std::string name = {})
{
    std::vector<Tuple> out;
    for (const auto& t : a.tuples())
        if (!b.contains(t))
            out.push_back(t);
    return Instance(name.empty() ? a.name() : std::move(name), a.schema(), std::move(out));
}

} // namespace prefq

#endif // PREFQ_INSTANCE_HPP_
