#ifndef PREFQ_SERVICE_HPP_
#define PREFQ_SERVICE_HPP_

#include "prefq/session.hpp"

#include <httplib.h>
#include <json.hpp>

#include <mutex>
#include <shared_mutex>
#include <string>
#include <utility>

namespace prefq {

using Json = nlohmann::json;

struct ServiceResponse
{
    int status = 200;
    Json body;
};

namespace detail {

inline std::string error_type(const std::exception& e)
{
    if (dynamic_cast<const SyntaxError*>(&e))
        return "SyntaxError";
    if (dynamic_cast<const TypeError*>(&e))
        return "TypeError";
    if (dynamic_cast<const SchemaMismatch*>(&e))
        return "SchemaMismatch";
    if (dynamic_cast<const StageCapExceeded*>(&e))
        return "StageCapExceeded";
    if (dynamic_cast<const NotAnIntervalOrder*>(&e))
        return "NotAnIntervalOrder";
    if (dynamic_cast<const NotSPO*>(&e))
        return "NotSPO";
    if (dynamic_cast<const StaleCache*>(&e))
        return "StaleCache";
    if (dynamic_cast<const HeaderMismatch*>(&e))
        return "HeaderMismatch";
    if (dynamic_cast<const ValueParseError*>(&e))
        return "ValueParseError";
    if (dynamic_cast<const DuplicateTuple*>(&e))
        return "DuplicateTuple";
    if (dynamic_cast<const OverlapError*>(&e))
        return "OverlapError";
    if (dynamic_cast<const VersionError*>(&e))
        return "VersionError";
    if (dynamic_cast<const IoError*>(&e))
        return "IoError";
    if (dynamic_cast<const NameError*>(&e))
        return "NameError";
    if (dynamic_cast<const Json::exception*>(&e))
        return "RequestError";
    return "Error";
}

inline Json rows_json(const Instance& r)
{
    Json rows = Json::array();
    for (const auto& t : r.tuples())
    {
        Json row = Json::array();
        for (const auto& v : t)
            row.push_back(v.str());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json columns_json(const Schema& s)
{
    Json cols = Json::array();
    for (const auto& a : s)
        cols.push_back({{"name", a.name}, {"sort", std::string(sort_name(a.sort))}});
    return cols;
}

inline Json properties_json(const PropertyReport& p) { return {{"spo", p.spo}, {"io", p.io}, {"wo", p.wo}}; }

inline Json conflict_json(const ConflictReport& c)
{
    Json j = {{"level", c.level},
              {"compatible", !c.satisfiable},
              {"witness_formula", c.witness_formula.str()}};
    if (c.sample_witness)
        j["witness"] = {tuple_str(c.sample_witness->first), tuple_str(c.sample_witness->second)};
    else
        j["witness"] = nullptr;
    return j;
}

inline Tuple tuple_from_json(const Json& row, const Schema& schema)
{
    if (!row.is_array())
        throw TypeError("tuple must be a JSON array");
    std::string lit = "(";
    for (std::size_t i = 0; i < row.size(); ++i)
    {
        if (i)
            lit += ", ";
        if (row[i].is_string())
        {
            std::string s = row[i].get<std::string>();
            std::string q = "'";
            for (char c : s)
                q += c == '\'' ? std::string("''") : std::string(1, c);
            lit += q + "'";
        }
        else
        {
            lit += row[i].dump();
        }
    }
    return parse_tuple(lit + ")", schema);
}

inline std::vector<Tuple> tuples_from_json(const Json& body, const char* key, const Schema& schema)
{
    std::vector<Tuple> out;
    if (body.contains(key))
        for (const auto& row : body.at(key))
            out.push_back(tuple_from_json(row, schema));
    return out;
}

inline Json relation_json(const std::string& name, const StoredRelation& r)
{
    return {{"name", name},
            {"schema", r.instance.schema().to_string()},
            {"columns", columns_json(r.instance.schema())},
            {"version", r.version},
            {"rows", rows_json(r.instance)}};
}

inline Json preference_json(const PreferenceRelation& p)
{
    return {{"name", p.name()}, {"schema", p.schema().to_string()}, {"formula", p.formula().str()}};
}

} // namespace detail

/// JSON-over-HTTP front end of a Session. Mutating requests take an
/// exclusive lock, read-only ones a shared lock.
class Service
{
  public:
    explicit Service(Session& session) : session_(session) { routes(); }

    /// Dispatches one request; usable without a socket.
    ServiceResponse handle(const std::string& method, const std::string& path, const std::string& body_text)
    {
        try
        {
            Json body = body_text.empty() ? Json::object() : Json::parse(body_text);
            if (method == "GET" && path == "/session")
                return shared([&] { return get_session(); });
            if (method == "GET" && path.rfind("/relations/", 0) == 0)
                return shared([&] { return get_relation(path.substr(11)); });
            if (method != "POST")
                return {404, {{"error", {{"type", "NotFound"}, {"message", method + " " + path}}}}};
            if (path == "/relations")
                return exclusive([&] { return post_relation(body); });
            if (path == "/preferences")
                return exclusive([&] { return post_preference(body); });
            if (path == "/winnow")
                return exclusive([&] { return post_winnow(body); });
            if (path == "/revise")
                return exclusive([&] { return post_revise(body); });
            if (path == "/check")
                return shared([&] { return post_check(body); });
            if (path == "/compat")
                return shared([&] { return post_compat(body); });
            if (path == "/update")
                return exclusive([&] { return post_update(body); });
            if (path == "/rank")
                return shared([&] { return post_rank(body); });
            if (path == "/extend-wo")
                return exclusive([&] { return post_extend(body); });
            if (path == "/session/save")
                return shared([&] {
                    session_.save(body.at("path").get<std::string>());
                    return ServiceResponse{200, {{"saved", body.at("path")}}};
                });
            if (path == "/session/load")
                return exclusive([&] {
                    session_.load(body.at("path").get<std::string>());
                    return get_session();
                });
            return {404, {{"error", {{"type", "NotFound"}, {"message", method + " " + path}}}}};
        }
        catch (const std::exception& e)
        {
            Json err = {{"type", detail::error_type(e)}, {"message", e.what()}};
            if (auto* se = dynamic_cast<const SyntaxError*>(&e))
                err["position"] = se->position();
            if (auto* ve = dynamic_cast<const ValueParseError*>(&e))
            {
                err["row"] = ve->row();
                err["column"] = ve->column();
            }
            return {dynamic_cast<const NameError*>(&e) ? 404 : 400, {{"error", err}}};
        }
    }

    bool listen(const std::string& host, int port) { return server_.listen(host, port); }
    bool bind(const std::string& host, int port) { return server_.bind_to_port(host, port); }
    int bind_any(const std::string& host) { return server_.bind_to_any_port(host); }
    bool listen_after_bind() { return server_.listen_after_bind(); }
    void stop() { server_.stop(); }
    void wait_until_ready() { server_.wait_until_ready(); }

  private:
    template <typename F>
    ServiceResponse shared(F f)
    {
        std::shared_lock lock(mutex_);
        return f();
    }

    template <typename F>
    ServiceResponse exclusive(F f)
    {
        std::unique_lock lock(mutex_);
        return f();
    }

    void routes()
    {
        auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
            ServiceResponse r = handle(req.method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.body.dump(2), "application/json");
        };
        server_.Get(R"(/session)", adapt);
        server_.Get(R"(/relations/(\w+))", adapt);
        server_.Post(R"(/[\w/-]+)", adapt);
        server_.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server_.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                     {"Access-Control-Allow-Headers", "Content-Type"}});
    }

    ServiceResponse get_session() const
    {
        Json rels = Json::array();
        for (const auto& [name, r] : session_.relations())
            rels.push_back({{"name", name},
                            {"schema", r.instance.schema().to_string()},
                            {"version", r.version},
                            {"size", r.instance.size()}});
        Json prefs = Json::array();
        for (const auto& [name, p] : session_.preferences())
            prefs.push_back(detail::preference_json(p));
        Json caches = Json::array();
        for (const auto& [key, c] : session_.caches())
            caches.push_back(
                {{"pref", key.first}, {"relation", key.second}, {"version", c.version}, {"size", c.result.size()}});
        return {200,
                {{"relations", rels}, {"preferences", prefs}, {"caches", caches}, {"history", session_.history()}}};
    }

    ServiceResponse get_relation(const std::string& name) const
    {
        return {200, detail::relation_json(name, session_.relation(name))};
    }

    ServiceResponse post_relation(const Json& body)
    {
        const std::string name = body.at("name");
        Schema schema = parse_schema(body.at("schema").get<std::string>());
        Instance r = load_csv_text(body.at("csv").get<std::string>(), schema, name);
        session_.define_relation(name, schema, r.tuples());
        return {200, detail::relation_json(name, session_.relation(name))};
    }

    ServiceResponse post_preference(const Json& body)
    {
        std::optional<std::string> on;
        std::optional<Schema> schema;
        if (body.contains("relation"))
            on = body.at("relation").get<std::string>();
        if (body.contains("schema"))
            schema = parse_schema(body.at("schema").get<std::string>());
        const auto& p = session_.define_preference(body.at("name"), body.at("dsl"), on, schema);
        Json out = detail::preference_json(p);
        out["properties"] = detail::properties_json(property_report(p));
        return {200, out};
    }

    ServiceResponse post_winnow(const Json& body)
    {
        const std::string pref = body.at("pref");
        const std::string rel = body.at("relation");
        WinnowOutcome w = session_.winnow(pref, rel);
        const Instance& r = session_.relation(rel).instance;
        Json dominated = Json::array();
        for (const auto& [row, by] : w.dominated)
            dominated.push_back({{"row", detail::rows_json(Instance("", r.schema(), {r[row]}))[0]},
                                 {"by", detail::rows_json(Instance("", r.schema(), {r[by]}))[0]}});
        return {200,
                {{"pref", pref},
                 {"relation", rel},
                 {"columns", detail::columns_json(r.schema())},
                 {"rows", detail::rows_json(w.result)},
                 {"source", std::string(winnow_source_name(w.source))},
                 {"reused", w.source != WinnowSource::Cold},
                 {"reused_from", w.reused_from},
                 {"dominated", dominated},
                 {"properties", detail::properties_json(property_report(session_.preference(pref)))}}};
    }

    ServiceResponse post_revise(const Json& body)
    {
        const std::string base = body.at("base");
        const std::string revising = body.at("revising");
        if (body.contains("revising_dsl"))
            session_.define_preference(revising, body.at("revising_dsl"), std::nullopt,
                                       session_.preference(base).schema());
        auto op = parse_composition(body.value("operator", std::string("union")));
        if (!op)
            throw SyntaxError(0, "unknown operator '" + body.value("operator", std::string()) + "'");
        TcMode tc = TcMode::Auto;
        if (body.contains("tc") && !body.at("tc").is_null())
            tc = body.at("tc").get<bool>() ? TcMode::Force : TcMode::Skip;
        const std::string name = body.value("name", base + "_" + revising);
        ReviseOutcome r = session_.revise(base, revising, *op, tc, body.value("flip", false), name);
        Json compat = Json::array();
        for (const auto& c : r.conflicts)
            compat.push_back(detail::conflict_json(c));
        Json out = detail::preference_json(r.relation);
        out["tc_applied"] = r.tc_applied;
        out["tc_reason"] = r.tc_reason;
        out["properties"] = detail::properties_json(r.properties);
        out["spo"] = r.properties.spo;
        out["compat"] = compat;
        return {200, out};
    }

    ServiceResponse post_check(const Json& body) const
    {
        const std::string pref = body.at("pref");
        auto prop = parse_property(body.at("property").get<std::string>());
        if (!prop)
            throw SyntaxError(0, "unknown property '" + body.at("property").get<std::string>() + "'");
        return {200,
                {{"pref", pref},
                 {"property", std::string(property_name(*prop))},
                 {"holds", session_.check(pref, *prop)}}};
    }

    ServiceResponse post_compat(const Json& body) const
    {
        const std::string pref = body.at("pref");
        const std::string against = body.at("against");
        Level2Reading reading =
            body.value("reading", std::string("dual-chain")) == "literal" ? Level2Reading::Literal
                                                                          : Level2Reading::DualChain;
        Json reports = Json::array();
        if (body.contains("level"))
            reports.push_back(detail::conflict_json(session_.compat(pref, against, body.at("level"), reading)));
        else
            for (int level = 0; level < 3; ++level)
                reports.push_back(detail::conflict_json(session_.compat(pref, against, level, reading)));
        return {200, {{"pref", pref}, {"against", against}, {"reports", reports}}};
    }

    ServiceResponse post_update(const Json& body)
    {
        const std::string rel = body.at("relation");
        const Schema schema = session_.relation(rel).instance.schema();
        UpdateOutcome u = session_.update(rel, detail::tuples_from_json(body, "insert", schema),
                                          detail::tuples_from_json(body, "delete", schema));
        Json results = Json::array();
        for (const auto& e : u.results)
        {
            Json j = {{"pref", e.preference}, {"rows", detail::rows_json(e.result)}, {"reused", e.reused}};
            j["lower_bound"] = e.lower_bound ? detail::rows_json(*e.lower_bound) : Json(nullptr);
            results.push_back(std::move(j));
        }
        return {200,
                {{"relation", rel},
                 {"version", u.version},
                 {"rows", detail::rows_json(u.relation)},
                 {"results", results}}};
    }

    ServiceResponse post_rank(const Json& body) const
    {
        const std::string pref = body.at("pref");
        const std::string rel = body.at("relation");
        const Instance& r = session_.relation(rel).instance;
        RankAssignment rk = session_.rank(pref, rel);
        Json rows = detail::rows_json(r);
        Json out = Json::array();
        for (std::size_t i = 0; i < r.size(); ++i)
            out.push_back({{"row", rows[i]}, {"rank", rk[i]}});
        return {200, {{"pref", pref}, {"relation", rel}, {"ranks", out}}};
    }

    ServiceResponse post_extend(const Json& body)
    {
        const std::string pref = body.at("pref");
        const std::string expr_name = detail::to_upper(body.value("expr", std::string("E2")));
        if (expr_name != "E1" && expr_name != "E2")
            throw SyntaxError(0, "expr must be E1 or E2");
        const RuleExpression expr = expr_name == "E1" ? RuleExpression::E1 : RuleExpression::E2;
        StageTrace t = session_.trace(pref, expr);
        Json stages = Json::array();
        for (const auto& s : t.stages)
            stages.push_back({{"index", s.index},
                              {"formula", s.relation.formula().str()},
                              {"is_wo", s.is_wo},
                              {"new_facts", s.new_facts}});
        Json out = {{"pref", pref}, {"expr", expr_name}, {"stages", stages}, {"warnings", t.warnings}};
        if (body.contains("name") && expr == RuleExpression::E2)
            out["result"] = detail::preference_json(session_.extend(pref, body.at("name")));
        return {200, out};
    }

    Session& session_;
    std::shared_mutex mutex_;
    httplib::Server server_;
};

} // namespace prefq

#endif // PREFQ_SERVICE_HPP_
