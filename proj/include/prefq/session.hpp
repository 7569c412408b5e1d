#ifndef PREFQ_SESSION_HPP_
#define PREFQ_SESSION_HPP_

#include "prefq/algebra.hpp"
#include "prefq/closure.hpp"
#include "prefq/compatibility.hpp"
#include "prefq/errors.hpp"
#include "prefq/instance.hpp"
#include "prefq/parser.hpp"
#include "prefq/restriction.hpp"
#include "prefq/winnow.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace prefq {

/// A module error raised while executing the n-th command (1-based) of a batch.
class CommandError : public Error
{
  public:
    CommandError(std::size_t index, std::string command, const std::exception& cause)
        : Error("command " + std::to_string(index) + " (" + command + "): " + cause.what()), index_(index),
          command_(std::move(command)), cause_(cause.what())
    {
    }

    std::size_t index() const noexcept { return index_; }
    const std::string& command() const noexcept { return command_; }
    const std::string& cause() const noexcept { return cause_; }

  private:
    std::size_t index_;
    std::string command_;
    std::string cause_;
};

inline constexpr std::string_view kSessionMagic = "PREFQ-SESSION";
inline constexpr int kSessionFormatVersion = 1;

enum class TcMode
{
    Auto,
    Force,
    Skip
};

struct StoredRelation
{
    Instance instance;
    std::uint64_t version = 1;
};

struct PropertyReport
{
    bool spo = false;
    bool io = false;
    bool wo = false;
};

inline PropertyReport property_report(const PreferenceRelation& p)
{
    PropertyReport r;
    r.spo = check_property(p, OrderProperty::SPO);
    r.io = r.spo && check_property(p, OrderProperty::IO);
    r.wo = r.spo && check_property(p, OrderProperty::WO);
    return r;
}

enum class WinnowSource
{
    Cold,
    Cached,
    Refined
};

inline std::string_view winnow_source_name(WinnowSource s)
{
    switch (s)
    {
    case WinnowSource::Cold: return "cold";
    case WinnowSource::Cached: return "cached";
    case WinnowSource::Refined: return "refined";
    }
    return "?";
}

struct WinnowOutcome
{
    Instance result;
    WinnowSource source = WinnowSource::Cold;
    std::string reused_from; // preference whose cached result was filtered
    // (dominated row, first dominating row) in r's order
    std::vector<std::pair<std::size_t, std::size_t>> dominated;
};

struct ReviseOutcome
{
    PreferenceRelation relation;
    bool tc_applied = false;
    std::string tc_reason;
    PropertyReport properties;
    std::array<ConflictReport, 3> conflicts;
};

struct UpdateEntry
{
    std::string preference;
    Instance result;
    bool reused = false;
    std::optional<Instance> lower_bound;
};

struct UpdateOutcome
{
    Instance relation;
    std::uint64_t version = 0;
    std::vector<UpdateEntry> results;
};

namespace detail {

inline std::string to_upper(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

/// Splits on ';' and newlines outside single quotes; drops blank lines and
/// '#' / '--' comments.
inline std::vector<std::string> split_commands(std::string_view text)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    auto flush = [&] {
        std::string_view t = trim(cur);
        if (!t.empty() && t.front() != '#' && t.substr(0, 2) != "--")
            out.emplace_back(t);
        cur.clear();
    };
    for (char c : text)
    {
        if (c == '\'')
            quoted = !quoted;
        if (!quoted && (c == ';' || c == '\n'))
        {
            flush();
            continue;
        }
        cur += c;
    }
    flush();
    return out;
}

/// Splits "(a, 1), ('b', 2)" into its parenthesized groups.
inline std::vector<std::string> split_tuples(std::string_view text)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size())
    {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == ',')
        {
            ++i;
            continue;
        }
        if (c != '(')
            throw SyntaxError(i, "expected '(' to start a tuple");
        bool quoted = false;
        std::size_t j = i + 1;
        for (; j < text.size(); ++j)
        {
            if (text[j] == '\'')
                quoted = !quoted;
            else if (!quoted && text[j] == ')')
                break;
        }
        if (j == text.size())
            throw SyntaxError(i, "unterminated tuple");
        out.emplace_back(text.substr(i, j - i + 1));
        i = j + 1;
    }
    return out;
}

inline std::string tuples_literal(const std::vector<Tuple>& ts)
{
    std::string out;
    for (std::size_t i = 0; i < ts.size(); ++i)
        out += (i ? ", " : "") + tuple_str(ts[i]);
    return out;
}

inline std::string trim_copy(std::string_view s) { return std::string(trim(s)); }

inline std::regex command_regex(const char* pattern)
{
    return std::regex(pattern, std::regex::ECMAScript | std::regex::icase);
}

inline std::string unquote_path(std::string s)
{
    if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'')
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace detail

/// Renders an instance as an aligned text table.
inline std::string render_table(const Instance& r)
{
    std::vector<std::size_t> width;
    for (const auto& a : r.schema())
        width.push_back(a.name.size());
    for (const auto& t : r.tuples())
        for (std::size_t i = 0; i < t.size(); ++i)
            width[i] = std::max(width[i], t[i].str().size());
    auto line = [&](auto cell) {
        std::string out;
        for (std::size_t i = 0; i < width.size(); ++i)
        {
            std::string c = cell(i);
            out += (i ? " | " : "") + c;
            if (i + 1 < width.size())
                out += std::string(width[i] - c.size(), ' ');
        }
        return out + "\n";
    };
    std::string out = line([&](std::size_t i) { return r.schema()[i].name; });
    out += line([&](std::size_t i) { return std::string(width[i], '-'); });
    for (const auto& t : r.tuples())
        out += line([&](std::size_t i) { return t[i].str(); });
    out += "(" + std::to_string(r.size()) + (r.size() == 1 ? " row)\n" : " rows)\n");
    return out;
}

/// Named relations, preferences and cached winnow results of one
/// interactive session. Mutating operations append their canonical command
/// to the history, so replaying the history rebuilds the state.
class Session
{
  public:
    explicit Session(std::filesystem::path base_dir = ".") : base_dir_(std::move(base_dir)) {}

    const std::map<std::string, StoredRelation>& relations() const noexcept { return relations_; }
    const std::map<std::string, PreferenceRelation>& preferences() const noexcept { return preferences_; }
    const std::map<std::pair<std::string, std::string>, CachedResult>& caches() const noexcept { return caches_; }
    const std::vector<std::string>& history() const noexcept { return history_; }
    int stage_cap() const noexcept { return stage_cap_; }
    void set_stage_cap(int cap) { stage_cap_ = cap; }
    void set_base_dir(std::filesystem::path dir) { base_dir_ = std::move(dir); }

    const StoredRelation& relation(const std::string& name) const
    {
        auto it = relations_.find(name);
        if (it == relations_.end())
            throw NameError("no relation named '" + name + "'");
        return it->second;
    }

    const PreferenceRelation& preference(const std::string& name) const
    {
        auto it = preferences_.find(name);
        if (it == preferences_.end())
            throw NameError("no preference named '" + name + "'");
        return it->second;
    }

    // ---- mutating operations ----

    const Instance& load_relation(const std::string& name, const std::string& path, const Schema& schema)
    {
        std::ifstream in(resolve(path));
        if (!in)
            throw IoError("cannot open '" + path + "'");
        Instance r = load_csv(in, schema, name);
        put_relation(std::move(r));
        record("LOAD " + name + " FROM " + path + " (" + schema.to_string() + ")");
        return relations_.at(name).instance;
    }

    const Instance& define_relation(const std::string& name, const Schema& schema, std::vector<Tuple> tuples)
    {
        Instance r(name, schema, std::move(tuples));
        std::string cmd = "DEFINE " + name + " (" + schema.to_string() + ") AS " + detail::tuples_literal(r.tuples());
        put_relation(std::move(r));
        record(std::move(cmd));
        return relations_.at(name).instance;
    }

    /// Schema comes from `schema`, else from relation `on`, else from the most
    /// recently loaded relation over which the formula type-checks.
    const PreferenceRelation& define_preference(const std::string& name, const std::string& dsl,
                                                const std::optional<std::string>& on = std::nullopt,
                                                const std::optional<Schema>& schema = std::nullopt)
    {
        PreferenceFormula f;
        if (schema)
            f = parse_formula(dsl, *schema);
        else if (on)
            f = parse_formula(dsl, relation(*on).instance.schema());
        else
            f = infer_and_parse(dsl);
        put_preference(PreferenceRelation(name, std::move(f)));
        const auto& p = preferences_.at(name);
        record("PREF " + name + " (" + p.schema().to_string() + ") = " + p.formula().str());
        return p;
    }

    WinnowOutcome winnow(const std::string& pref, const std::string& rel)
    {
        const PreferenceRelation& p = preference(pref);
        const StoredRelation& r = relation(rel);
        require_same_schema(p.schema(), r.instance.schema());
        WinnowOutcome out;
        auto key = std::make_pair(pref, rel);
        if (auto it = caches_.find(key); it != caches_.end() && it->second.version == r.version)
        {
            out.result = it->second.result;
            out.source = WinnowSource::Cached;
        }
        else
        {
            bool done = false;
            for (const auto& [k, cache] : caches_)
            {
                if (k.second != rel || k.first == pref || cache.version != r.version)
                    continue;
                auto refined = winnow_refine(p, cache, r.instance);
                if (refined.reused)
                {
                    out.result = std::move(refined.result);
                    out.source = WinnowSource::Refined;
                    out.reused_from = k.first;
                    done = true;
                    break;
                }
            }
            if (!done)
                out.result = prefq::winnow(p, r.instance);
            caches_[key] = CachedResult{p, rel, r.version, out.result};
            record("WINNOW " + pref + " OVER " + rel);
        }
        out.dominated = dominators(p, r.instance, out.result);
        return out;
    }

    ReviseOutcome revise(const std::string& base, const std::string& revising, Composition op, TcMode tc, bool flip,
                         const std::string& name)
    {
        const PreferenceRelation& p = preference(base);
        const PreferenceRelation& p0 = preference(revising);
        require_same_schema(p.schema(), p0.schema());
        ReviseOutcome out;
        // The revising relation is the first operand unless flipped.
        PreferenceRelation composed = flip ? compose(p, p0, op, name) : compose(p0, p, op, name);
        if (tc == TcMode::Force)
        {
            out.tc_applied = true;
            out.tc_reason = "requested";
        }
        else if (tc == TcMode::Skip)
        {
            out.tc_reason = "skipped on request";
        }
        else if (op == Composition::Prioritized && check_property(flip ? p : p0, OrderProperty::WO) &&
                 check_property(flip ? p0 : p, OrderProperty::SPO))
        {
            out.tc_reason = "not needed: prioritized over a weak order preserves SPO";
        }
        else if (check_property(composed, OrderProperty::Transitive))
        {
            out.tc_reason = "not needed: composition already transitive";
        }
        else
        {
            out.tc_applied = true;
            out.tc_reason = "composition not transitive";
        }
        out.relation = out.tc_applied ? transitive_closure(composed, stage_cap_, name) : composed.renamed(name);
        out.properties = property_report(out.relation);
        for (int level = 0; level < 3; ++level)
            out.conflicts[level] = conflict_formula(p, p0, level, Level2Reading::DualChain, stage_cap_);
        put_preference(out.relation);
        std::string cmd = "REVISE " + base + " WITH " + revising + " USING " +
                          detail::to_upper(composition_name(op));
        if (tc == TcMode::Force)
            cmd += " TC";
        else if (tc == TcMode::Skip)
            cmd += " NOTC";
        if (flip)
            cmd += " FLIP";
        record(cmd + " AS " + name);
        return out;
    }

    const PreferenceRelation& closure(const std::string& pref, const std::string& name)
    {
        put_preference(transitive_closure(preference(pref), stage_cap_, name));
        record("TC " + pref + " AS " + name);
        return preferences_.at(name);
    }

    /// Weak-order extension via E2; registers it under `name`.
    const PreferenceRelation& extend(const std::string& pref, const std::string& name)
    {
        put_preference(wo_extension_io(preference(pref), stage_cap_).renamed(name));
        record("EXTEND " + pref + " AS " + name);
        return preferences_.at(name);
    }

    UpdateOutcome update(const std::string& rel, const std::vector<Tuple>& ins, const std::vector<Tuple>& del)
    {
        auto found = relations_.find(rel);
        if (found == relations_.end())
            throw NameError("no relation named '" + rel + "'");
        StoredRelation& stored = found->second;
        Instance updated = apply_update(stored.instance, ins, del);
        Instance delta_ins(rel, stored.instance.schema(), {});
        {
            std::vector<Tuple> fresh;
            for (const auto& t : updated.tuples())
                if (!stored.instance.contains(t))
                    fresh.push_back(t);
            delta_ins = Instance(rel, stored.instance.schema(), std::move(fresh));
        }
        Instance delta_del = set_difference(stored.instance, updated);
        UpdateOutcome out;
        const std::uint64_t old_version = stored.version;
        stored.instance = updated;
        stored.version = old_version + 1;
        for (auto& [key, cache] : caches_)
        {
            if (key.second != rel || cache.version != old_version)
                continue;
            const PreferenceRelation& p = preferences_.at(key.first);
            UpdateEntry e;
            e.preference = key.first;
            const bool spo = check_property(p, OrderProperty::SPO);
            if (delta_del.empty() && spo)
            {
                e.result = winnow_insert(p, cache, delta_ins);
                e.reused = true;
            }
            else
            {
                if (delta_ins.empty())
                    e.lower_bound = winnow_delete_bound(cache, delta_del);
                e.result = prefq::winnow(p, updated);
            }
            e.result = e.result.renamed("w(" + p.name() + "," + rel + ")");
            cache.result = e.result;
            cache.version = stored.version;
            out.results.push_back(std::move(e));
        }
        // Entries for older versions are no longer valid.
        std::erase_if(caches_, [&](const auto& kv) {
            return kv.first.second == rel && kv.second.version != stored.version;
        });
        out.relation = stored.instance;
        out.version = stored.version;
        std::string cmd = "UPDATE " + rel;
        if (!ins.empty())
            cmd += " INSERT " + detail::tuples_literal(ins);
        if (!del.empty())
            cmd += " DELETE " + detail::tuples_literal(del);
        record(std::move(cmd));
        return out;
    }

    // ---- read-only operations ----

    bool check(const std::string& pref, OrderProperty prop) const { return check_property(preference(pref), prop); }

    /// p plays the relation being revised, p0 the revising one.
    ConflictReport compat(const std::string& pref, const std::string& pref0, int level,
                          Level2Reading reading = Level2Reading::DualChain) const
    {
        return conflict_formula(preference(pref), preference(pref0), level, reading, stage_cap_);
    }

    RankAssignment rank(const std::string& pref, const std::string& rel) const
    {
        return prefq::rank(preference(pref), relation(rel).instance);
    }

    StageTrace trace(const std::string& pref, RuleExpression expr) const
    {
        return eval_expression(expr, preference(pref), stage_cap_);
    }

    // ---- persistence ----

    /// Versioned text form: relations as CSV, preferences as DSL, cache
    /// metadata with result rows, then the history.
    std::string serialize() const
    {
        std::ostringstream out;
        out << kSessionMagic << ' ' << kSessionFormatVersion << '\n';
        for (const auto& [name, r] : relations_)
        {
            out << "RELATION " << name << " VERSION " << r.version << " ROWS " << r.instance.size() << " SCHEMA "
                << r.instance.schema().to_string() << '\n';
            out << serialize_csv(r.instance);
        }
        for (const auto& [name, p] : preferences_)
            out << "PREFERENCE " << name << " SCHEMA " << p.schema().to_string() << '\n' << p.formula().str() << '\n';
        for (const auto& [key, c] : caches_)
        {
            out << "CACHE " << key.first << ' ' << key.second << " VERSION " << c.version << " ROWS "
                << c.result.size() << '\n';
            out << serialize_csv(c.result);
        }
        out << "HISTORY " << history_.size() << '\n';
        for (const auto& h : history_)
            out << h << '\n';
        out << "END\n";
        return out.str();
    }

    static Session deserialize(std::istream& in, std::filesystem::path base_dir = ".")
    {
        Session s(std::move(base_dir));
        std::string line;
        if (!std::getline(in, line))
            throw VersionError("empty session file");
        std::istringstream head(line);
        std::string magic;
        int version = 0;
        head >> magic >> version;
        if (magic != kSessionMagic)
            throw VersionError("not a session file");
        if (version != kSessionFormatVersion)
            throw VersionError("unsupported session format version " + std::to_string(version));
        auto read_block = [&](std::size_t rows) {
            std::string block, row;
            for (std::size_t i = 0; i <= rows; ++i)
            {
                if (!std::getline(in, row))
                    throw IoError("truncated session file");
                block += row + '\n';
            }
            return block;
        };
        const std::regex rel_re(R"(^RELATION (\w+) VERSION (\d+) ROWS (\d+) SCHEMA (.+)$)");
        const std::regex pref_re(R"(^PREFERENCE (\w+) SCHEMA (.+)$)");
        const std::regex cache_re(R"(^CACHE (\w+) (\w+) VERSION (\d+) ROWS (\d+)$)");
        const std::regex hist_re(R"(^HISTORY (\d+)$)");
        std::smatch m;
        bool ended = false;
        while (std::getline(in, line))
        {
            if (line == "END")
            {
                ended = true;
                break;
            }
            if (std::regex_match(line, m, rel_re))
            {
                Schema schema = parse_schema(m[4].str());
                std::string name = m[1];
                std::uint64_t ver = std::stoull(m[2]);
                Instance r = load_csv_text(read_block(std::stoull(m[3])), schema, name);
                s.relations_[name] = StoredRelation{std::move(r), ver};
                s.touch(name);
            }
            else if (std::regex_match(line, m, pref_re))
            {
                Schema schema = parse_schema(m[2].str());
                std::string name = m[1];
                if (!std::getline(in, line))
                    throw IoError("truncated session file");
                s.preferences_[name] = PreferenceRelation(name, parse_formula(line, schema));
            }
            else if (std::regex_match(line, m, cache_re))
            {
                const auto& p = s.preference(m[1]);
                const auto& r = s.relation(m[2]);
                Instance res = load_csv_text(read_block(std::stoull(m[4])), r.instance.schema(),
                                             "w(" + p.name() + "," + r.instance.name() + ")");
                s.caches_[{m[1], m[2]}] = CachedResult{p, m[2], std::stoull(m[3]), std::move(res)};
            }
            else if (std::regex_match(line, m, hist_re))
            {
                const std::size_t n = std::stoull(m[1]);
                for (std::size_t i = 0; i < n; ++i)
                {
                    if (!std::getline(in, line))
                        throw IoError("truncated session file");
                    s.history_.push_back(line);
                }
            }
            else
            {
                throw IoError("unrecognized session line: " + line);
            }
        }
        if (!ended)
            throw IoError("truncated session file");
        return s;
    }

    void save(const std::string& path) const
    {
        std::ofstream out(resolve(path));
        if (!out)
            throw IoError("cannot write '" + path + "'");
        out << serialize();
        if (!out)
            throw IoError("write to '" + path + "' failed");
    }

    /// Replaces the state; on any error the current state is untouched.
    void load(const std::string& path)
    {
        std::ifstream in(resolve(path));
        if (!in)
            throw IoError("cannot open '" + path + "'");
        Session loaded = deserialize(in, base_dir_);
        loaded.stage_cap_ = stage_cap_;
        *this = std::move(loaded);
    }

    // ---- command language ----

    /// Executes one or more commands and returns the rendered output.
    std::string execute(std::string_view text)
    {
        std::string out;
        std::size_t index = 0;
        for (const auto& cmd : detail::split_commands(text))
        {
            ++index;
            try
            {
                out += execute_one(cmd);
            }
            catch (const CommandError&)
            {
                throw;
            }
            catch (const std::exception& e)
            {
                throw CommandError(index, cmd, e);
            }
        }
        return out;
    }

    /// Re-executes the history in a fresh session.
    static Session replay(const std::vector<std::string>& history, std::filesystem::path base_dir = ".")
    {
        Session s(std::move(base_dir));
        for (const auto& h : history)
            s.execute(h);
        return s;
    }

  private:
    std::filesystem::path resolve(const std::string& path) const
    {
        std::filesystem::path p(path);
        return p.is_absolute() ? p : base_dir_ / p;
    }

    void record(std::string cmd) { history_.push_back(std::move(cmd)); }

    void touch(const std::string& name)
    {
        std::erase(load_order_, name);
        load_order_.push_back(name);
    }

    void put_relation(Instance r)
    {
        const std::string name = r.name();
        auto it = relations_.find(name);
        std::uint64_t version = it == relations_.end() ? 1 : it->second.version + 1;
        relations_[name] = StoredRelation{std::move(r), version};
        std::erase_if(caches_, [&](const auto& kv) { return kv.first.second == name; });
        touch(name);
    }

    void put_preference(PreferenceRelation p)
    {
        const std::string name = p.name();
        preferences_[name] = std::move(p);
        std::erase_if(caches_, [&](const auto& kv) { return kv.first.first == name; });
    }

    PreferenceFormula infer_and_parse(const std::string& dsl) const
    {
        if (load_order_.empty())
            throw NameError("no relation loaded; use PREF name ON relation = ... or give a schema");
        std::optional<TypeError> last;
        for (auto it = load_order_.rbegin(); it != load_order_.rend(); ++it)
        {
            try
            {
                return parse_formula(dsl, relations_.at(*it).instance.schema());
            }
            catch (const TypeError& e)
            {
                last = e;
            }
        }
        throw *last;
    }

    static std::vector<std::pair<std::size_t, std::size_t>> dominators(const PreferenceRelation& p, const Instance& r,
                                                                       const Instance& result)
    {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (std::size_t i = 0; i < r.size(); ++i)
        {
            if (result.contains(r[i]))
                continue;
            for (std::size_t j = 0; j < r.size(); ++j)
                if (eval_ground(p.formula(), r[j], r[i]))
                {
                    out.emplace_back(i, j);
                    break;
                }
        }
        return out;
    }

    static std::string yes_no(bool b) { return b ? "true" : "false"; }

    static std::string render_properties(const PropertyReport& r)
    {
        return "SPO " + yes_no(r.spo) + ", IO " + yes_no(r.io) + ", WO " + yes_no(r.wo);
    }

    static std::string render_conflict(const ConflictReport& c)
    {
        std::string out = std::to_string(c.level) + "-compatible: " + yes_no(!c.satisfiable);
        if (c.sample_witness)
            out += "  witness " + tuple_str(c.sample_witness->first) + " / " + tuple_str(c.sample_witness->second);
        return out + "\n";
    }

    std::vector<Tuple> parse_tuple_list(std::string_view text, const Schema& schema) const
    {
        std::vector<Tuple> out;
        for (const auto& t : detail::split_tuples(text))
            out.push_back(parse_tuple(t, schema));
        return out;
    }

    std::string execute_one(const std::string& cmd)
    {
        static const std::regex load_session_re = detail::command_regex(R"(^LOAD\s+SESSION\s+(.+)$)");
        static const std::regex save_session_re = detail::command_regex(R"(^SAVE\s+SESSION\s+(.+)$)");
        static const std::regex load_re =
            detail::command_regex(R"(^LOAD\s+(\w+)\s+FROM\s+('[^']*'|\S+)\s*\((.*)\)$)");
        static const std::regex define_re = detail::command_regex(R"(^DEFINE\s+(\w+)\s*\(([^)]*)\)\s*AS\b\s*(.*)$)");
        static const std::regex pref_re =
            detail::command_regex(R"(^PREF\s+(\w+)\s*(?:ON\s+(\w+)\s*|\(([^)]*)\)\s*)?=\s*(.+)$)");
        static const std::regex winnow_re = detail::command_regex(R"(^WINNOW\s+(\w+)\s+OVER\s+(\w+)$)");
        static const std::regex revise_re = detail::command_regex(
            R"(^REVISE\s+(\w+)\s+WITH\s+(\w+)\s+USING\s+(\w+)((?:\s+(?:TC|NOTC|FLIP))*)\s+AS\s+(\w+)$)");
        static const std::regex check_re = detail::command_regex(R"(^CHECK\s+(\w+)\s+(\w+)$)");
        static const std::regex compat_re =
            detail::command_regex(R"(^COMPAT\s+(\w+)\s+WITH\s+(\w+)(?:\s+LEVEL\s+([012]))?(\s+LITERAL)?$)");
        static const std::regex update_re = detail::command_regex(R"(^UPDATE\s+(\w+)\s+(.*)$)");
        static const std::regex rank_re = detail::command_regex(R"(^RANK\s+(\w+)\s+OVER\s+(\w+)$)");
        static const std::regex trace_re = detail::command_regex(R"(^TRACE\s+(\w+)\s+(E1|E2)$)");
        static const std::regex extend_re = detail::command_regex(R"(^EXTEND\s+(\w+)\s+AS\s+(\w+)$)");
        static const std::regex tc_re = detail::command_regex(R"(^TC\s+(\w+)\s+AS\s+(\w+)$)");
        static const std::regex show_re = detail::command_regex(R"(^SHOW\s+(\w+)$)");
        static const std::regex list_re = detail::command_regex(R"(^LIST$)");
        static const std::regex help_re = detail::command_regex(R"(^HELP$)");

        std::smatch m;
        if (std::regex_match(cmd, m, load_session_re))
        {
            load(detail::unquote_path(detail::trim_copy(m[1].str())));
            return "session loaded: " + std::to_string(relations_.size()) + " relations, " +
                   std::to_string(preferences_.size()) + " preferences\n";
        }
        if (std::regex_match(cmd, m, save_session_re))
        {
            save(detail::unquote_path(detail::trim_copy(m[1].str())));
            return "session saved\n";
        }
        if (std::regex_match(cmd, m, load_re))
        {
            const auto& r = load_relation(m[1], detail::unquote_path(m[2]), parse_schema(m[3].str()));
            return "loaded " + r.name() + " (" + r.schema().to_string() + "): " + std::to_string(r.size()) +
                   " rows\n";
        }
        if (std::regex_match(cmd, m, define_re))
        {
            Schema schema = parse_schema(m[2].str());
            const auto& r = define_relation(m[1], schema, parse_tuple_list(m[3].str(), schema));
            return "defined " + r.name() + " (" + r.schema().to_string() + "): " + std::to_string(r.size()) +
                   " rows\n";
        }
        if (std::regex_match(cmd, m, pref_re))
        {
            std::optional<std::string> on;
            std::optional<Schema> schema;
            if (m[2].matched)
                on = m[2].str();
            if (m[3].matched)
                schema = parse_schema(m[3].str());
            const auto& p = define_preference(m[1], m[4], on, schema);
            return p.name() + " = " + p.formula().str() + "\n";
        }
        if (std::regex_match(cmd, m, winnow_re))
        {
            auto w = winnow(m[1], m[2]);
            std::string out = render_table(w.result);
            if (w.source == WinnowSource::Refined)
                out += "note: reused cached result of " + w.reused_from + " (refinement of an SPO)\n";
            else if (w.source == WinnowSource::Cached)
                out += "note: served from cache\n";
            return out;
        }
        if (std::regex_match(cmd, m, revise_re))
        {
            auto op = parse_composition(m[3].str());
            if (!op)
                throw SyntaxError(0, "unknown composition '" + m[3].str() + "'");
            const std::string flags = detail::to_upper(m[4].str());
            std::istringstream fs(flags);
            TcMode tc = TcMode::Auto;
            bool flip = false;
            for (std::string w; fs >> w;)
            {
                if (w == "TC")
                    tc = TcMode::Force;
                else if (w == "NOTC")
                    tc = TcMode::Skip;
                else if (w == "FLIP")
                    flip = true;
            }
            auto r = revise(m[1], m[2], *op, tc, flip, m[5]);
            std::string out = r.relation.name() + " = " + r.relation.formula().str() + "\n";
            out += "transitive closure: " + std::string(r.tc_applied ? "applied" : "not applied") + " (" +
                   r.tc_reason + ")\n";
            out += "properties: " + render_properties(r.properties) + "\n";
            for (const auto& c : r.conflicts)
                out += render_conflict(c);
            return out;
        }
        if (std::regex_match(cmd, m, check_re))
        {
            auto prop = parse_property(m[2].str());
            if (!prop)
                throw SyntaxError(0, "unknown property '" + m[2].str() + "'");
            return std::string(property_name(*prop)) + "(" + m[1].str() + ") = " + yes_no(check(m[1], *prop)) + "\n";
        }
        if (std::regex_match(cmd, m, compat_re))
        {
            const Level2Reading reading = m[4].matched ? Level2Reading::Literal : Level2Reading::DualChain;
            std::string out;
            if (m[3].matched)
                return render_conflict(compat(m[1], m[2], std::stoi(m[3]), reading));
            for (int level = 0; level < 3; ++level)
                out += render_conflict(compat(m[1], m[2], level, reading));
            return out;
        }
        if (std::regex_match(cmd, m, update_re))
        {
            const Schema& schema = relation(m[1]).instance.schema();
            std::string tail = m[2];
            std::vector<Tuple> ins, del;
            // Clauses: INSERT <tuples> and/or DELETE <tuples>, in either order.
            std::size_t ipos = find_keyword(tail, "INSERT");
            std::size_t dpos = find_keyword(tail, "DELETE");
            if (ipos == std::string::npos && dpos == std::string::npos)
                throw SyntaxError(0, "UPDATE needs INSERT and/or DELETE");
            auto clause = [&](std::size_t pos, std::size_t other) {
                std::size_t start = pos + 6;
                std::size_t end = other != std::string::npos && other > pos ? other : tail.size();
                return std::string_view(tail).substr(start, end - start);
            };
            if (ipos != std::string::npos)
                ins = parse_tuple_list(clause(ipos, dpos), schema);
            if (dpos != std::string::npos)
                del = parse_tuple_list(clause(dpos, ipos), schema);
            auto u = update(m[1], ins, del);
            std::string out = "updated " + m[1].str() + " to version " + std::to_string(u.version) + ": " +
                              std::to_string(u.relation.size()) + " rows\n";
            for (const auto& e : u.results)
            {
                out += "winnow " + e.preference + " (" + (e.reused ? "incremental" : "recomputed") + "):\n";
                out += render_table(e.result);
                if (e.lower_bound)
                    out += "lower bound from cache: " + std::to_string(e.lower_bound->size()) + " rows\n";
            }
            return out;
        }
        if (std::regex_match(cmd, m, rank_re))
        {
            const Instance& r = relation(m[2]).instance;
            auto rk = rank(m[1], m[2]);
            std::string out;
            for (std::size_t i = 0; i < r.size(); ++i)
                out += std::to_string(rk[i]) + "  " + tuple_str(r[i]) + "\n";
            return out;
        }
        if (std::regex_match(cmd, m, trace_re))
        {
            auto t = trace(m[1], detail::to_upper(m[2].str()) == "E1" ? RuleExpression::E1 : RuleExpression::E2);
            std::string out;
            for (const auto& w : t.warnings)
                out += "warning: " + w + "\n";
            for (const auto& s : t.stages)
                out += "stage " + std::to_string(s.index) + " [WO " + yes_no(s.is_wo) + ", new facts " +
                       yes_no(s.new_facts) + "]: " + s.relation.formula().str() + "\n";
            return out;
        }
        if (std::regex_match(cmd, m, extend_re))
        {
            const auto& p = extend(m[1], m[2]);
            return p.name() + " = " + p.formula().str() + "\n";
        }
        if (std::regex_match(cmd, m, tc_re))
        {
            const auto& p = closure(m[1], m[2]);
            return p.name() + " = " + p.formula().str() + "\n";
        }
        if (std::regex_match(cmd, m, show_re))
        {
            const std::string name = m[1];
            if (auto it = preferences_.find(name); it != preferences_.end())
                return name + " (" + it->second.schema().to_string() + ") = " + it->second.formula().str() + "\n";
            const auto& r = relation(name);
            return name + " (" + r.instance.schema().to_string() + ") version " + std::to_string(r.version) + "\n" +
                   render_table(r.instance);
        }
        if (std::regex_match(cmd, m, list_re))
        {
            std::string out;
            for (const auto& [name, r] : relations_)
                out += "relation " + name + " (" + r.instance.schema().to_string() + ") " +
                       std::to_string(r.instance.size()) + " rows, version " + std::to_string(r.version) + "\n";
            for (const auto& [name, p] : preferences_)
                out += "preference " + name + " = " + p.formula().str() + "\n";
            for (const auto& [key, c] : caches_)
                out += "cache " + key.first + " over " + key.second + "@" + std::to_string(c.version) + ": " +
                       std::to_string(c.result.size()) + " rows\n";
            return out;
        }
        if (std::regex_match(cmd, m, help_re))
            return help_text();
        throw SyntaxError(0, "unrecognized command");
    }

    // Position of a standalone keyword outside quotes, case-insensitive.
    static std::size_t find_keyword(std::string_view text, std::string_view kw)
    {
        bool quoted = false;
        for (std::size_t i = 0; i + kw.size() <= text.size(); ++i)
        {
            if (text[i] == '\'')
                quoted = !quoted;
            if (quoted)
                continue;
            bool before_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
            std::size_t e = i + kw.size();
            bool after_ok = e == text.size() || !std::isalnum(static_cast<unsigned char>(text[e]));
            if (before_ok && after_ok && detail::to_upper(text.substr(i, kw.size())) == kw)
                return i;
        }
        return std::string::npos;
    }

  public:
    static std::string help_text()
    {
        return "commands (separate with ';' or newlines):\n"
               "  LOAD <rel> FROM <path> (<attr>:str|rat, ...)\n"
               "  DEFINE <rel> (<schema>) AS (v, ...), (v, ...)\n"
               "  PREF <name> [ON <rel> | (<schema>)] = <formula>\n"
               "  WINNOW <pref> OVER <rel>\n"
               "  REVISE <base> WITH <revising> USING UNION|PRIORITIZED|PARETO [TC|NOTC] [FLIP] AS <name>\n"
               "  CHECK <pref> IRREFLEXIVE|TRANSITIVE|NEGTRANSITIVE|CONNECTED|SPO|IO|WO|TOTAL\n"
               "  COMPAT <pref> WITH <pref0> [LEVEL 0|1|2] [LITERAL]\n"
               "  UPDATE <rel> [INSERT (..), ...] [DELETE (..), ...]\n"
               "  RANK <pref> OVER <rel>\n"
               "  TC <pref> AS <name>\n"
               "  TRACE <pref> E1|E2\n"
               "  EXTEND <pref> AS <name>\n"
               "  SHOW <name> | LIST | HELP\n"
               "  SAVE SESSION <path> | LOAD SESSION <path>\n";
    }

  private:
    std::filesystem::path base_dir_;
    std::map<std::string, StoredRelation> relations_;
    std::map<std::string, PreferenceRelation> preferences_;
    std::map<std::pair<std::string, std::string>, CachedResult> caches_;
    std::vector<std::string> history_;
    std::vector<std::string> load_order_;
    int stage_cap_ = kDefaultStageCap;
};

} // namespace prefq

#endif // PREFQ_SESSION_HPP_
