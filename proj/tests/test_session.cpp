#include "prefq/prefq.hpp"
#include "prefq/service.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

using namespace prefq;
namespace fs = std::filesystem;

namespace {

const std::string kSamples = PREFQ_SAMPLES_DIR;

fs::path temp_dir()
{
    fs::path d = fs::temp_directory_path() / ("prefq-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                              "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(d);
    return d;
}

Session car_session()
{
    Session s(kSamples);
    s.execute("LOAD car FROM cars.csv (make:str, year:rat);"
              "PREF c1 = x.make = y.make AND x.year > y.year;"
              "PREF c2 = x.make = 'VW' AND y.make <> 'VW' AND x.year = y.year");
    return s;
}

Tuple car_tuple(const char* make, long year) { return {Value::text(make), Value::rational(year)}; }

Json post(Service& svc, const std::string& path, const Json& body, int expect = 200)
{
    ServiceResponse r = svc.handle("POST", path, body.dump());
    EXPECT_EQ(r.status, expect) << path << ": " << r.body.dump();
    return r.body;
}

} // namespace

TEST(Commands, SplitsOnSemicolonsAndNewlines)
{
    auto cmds = detail::split_commands("A; B\n# comment\n-- other\nC 'x;y'");
    EXPECT_EQ(cmds, (std::vector<std::string>{"A", "B", "C 'x;y'"}));
}

TEST(Session, WinnowTable)
{
    Session s = car_session();
    std::string out = s.execute("WINNOW c1 OVER car");
    EXPECT_NE(out.find("2002"), std::string::npos);
    EXPECT_NE(out.find("Kia"), std::string::npos);
    EXPECT_EQ(s.winnow("c1", "car").result.tuples(),
              (std::vector<Tuple>{car_tuple("VW", 2002), car_tuple("Kia", 1997)}));
}

TEST(Session, ReviseAndRewinnowReusesCache)
{
    Session s = car_session();
    s.winnow("c1", "car");
    ReviseOutcome rev = s.revise("c1", "c2", Composition::Union, TcMode::Force, false, "cstar");
    EXPECT_TRUE(rev.tc_applied);
    EXPECT_TRUE(rev.properties.spo);
    for (const auto& c : rev.conflicts)
        EXPECT_FALSE(c.satisfiable);
    WinnowOutcome w = s.winnow("cstar", "car");
    EXPECT_EQ(w.result.tuples(), std::vector<Tuple>{car_tuple("VW", 2002)});
    EXPECT_EQ(w.source, WinnowSource::Refined);
    EXPECT_EQ(w.reused_from, "c1");
    EXPECT_EQ(s.winnow("cstar", "car").source, WinnowSource::Cached);
}

TEST(Session, ScriptPrintsReuseNote)
{
    Session s(kSamples);
    std::ifstream in(kSamples + "/revision.prefq");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string out = s.execute(text);
    EXPECT_NE(out.find("reused cached result of c1"), std::string::npos) << out;
}

TEST(Session, CheckAndTrace)
{
    Session s = car_session();
    s.execute("PREF c3 = x.make = 'VW' AND x.year = 1999 AND y.make = 'Kia' AND y.year = 1999");
    EXPECT_TRUE(s.check("c3", OrderProperty::IO));
    EXPECT_FALSE(s.check("c3", OrderProperty::WO));
    StageTrace t = s.trace("c3", RuleExpression::E2);
    EXPECT_TRUE(t.stages.back().is_wo);
}

TEST(Session, UpdateInsertUsesIncrementalLaw)
{
    Session s = car_session();
    s.winnow("c1", "car");
    UpdateOutcome u = s.update("car", {car_tuple("Kia", 2000)}, {});
    ASSERT_EQ(u.results.size(), 1u);
    EXPECT_TRUE(u.results[0].reused);
    {
        const auto& ts = u.results[0].result.tuples();
        EXPECT_EQ(std::set<Tuple>(ts.begin(), ts.end()), (std::set<Tuple>{car_tuple("VW", 2002), car_tuple("Kia", 2000)}));
    }
    EXPECT_EQ(s.relation("car").version, 2u);
}

TEST(Session, UpdateDeleteReportsBound)
{
    Session s = car_session();
    s.winnow("c1", "car");
    UpdateOutcome u = s.update("car", {}, {car_tuple("VW", 2002)});
    ASSERT_EQ(u.results.size(), 1u);
    ASSERT_TRUE(u.results[0].lower_bound);
    EXPECT_EQ(u.results[0].lower_bound->tuples(), std::vector<Tuple>{car_tuple("Kia", 1997)});
    EXPECT_EQ(u.results[0].result.size(), 2u);
}

TEST(Session, ErrorsNameTheCommand)
{
    Session s = car_session();
    try
    {
        s.execute("WINNOW c1 OVER car; WINNOW nope OVER car");
        FAIL() << "expected CommandError";
    }
    catch (const CommandError& e)
    {
        EXPECT_EQ(e.index(), 2u);
        EXPECT_EQ(e.command(), "WINNOW nope OVER car");
    }
    EXPECT_THROW(s.execute("FROB c1"), CommandError);
    EXPECT_THROW(s.execute("PREF bad = x.make > y.make"), CommandError);
}

TEST(Persistence, ReplayRebuildsState)
{
    Session s = car_session();
    s.execute("WINNOW c1 OVER car; REVISE c1 WITH c2 USING UNION TC AS cstar; UPDATE car INSERT (Kia, 2000)");
    Session r = Session::replay(s.history(), kSamples);
    EXPECT_EQ(r.serialize(), s.serialize());
}

TEST(Persistence, SaveLoadRoundTrip)
{
    fs::path dir = temp_dir();
    Session s = car_session();
    s.execute("WINNOW c1 OVER car; DEFINE tiny (v:str) AS ('a'), ('b')");
    s.save((dir / "state.prefq").string());
    Session t(dir);
    t.load("state.prefq");
    EXPECT_EQ(t.serialize(), s.serialize());
    EXPECT_EQ(t.winnow("c1", "car").source, WinnowSource::Cached);
}

TEST(Persistence, UnknownVersionRejected)
{
    fs::path dir = temp_dir();
    {
        std::ofstream out(dir / "future.prefq");
        out << kSessionMagic << " 99\nEND\n";
    }
    Session s = car_session();
    const std::string before = s.serialize();
    EXPECT_THROW(s.load((dir / "future.prefq").string()), VersionError);
    EXPECT_EQ(s.serialize(), before);
}

TEST(Persistence, MissingOrTruncatedFileLeavesState)
{
    fs::path dir = temp_dir();
    Session s = car_session();
    const std::string before = s.serialize();
    EXPECT_THROW(s.load((dir / "missing.prefq").string()), IoError);
    std::string text = before.substr(0, before.size() / 2);
    {
        std::ofstream out(dir / "cut.prefq");
        out << text;
    }
    EXPECT_THROW(s.load((dir / "cut.prefq").string()), Error);
    EXPECT_EQ(s.serialize(), before);
}

TEST(Service, CarLoop)
{
    Session s(kSamples);
    Service svc(s);
    post(svc, "/relations", {{"name", "car"}, {"schema", "make:str, year:rat"},
                             {"csv", "make,year\nVW,2002\nVW,1997\nKia,1997\n"}});
    post(svc, "/preferences", {{"name", "c1"}, {"dsl", "x.make = y.make AND x.year > y.year"}, {"relation", "car"}});
    Json w = post(svc, "/winnow", {{"pref", "c1"}, {"relation", "car"}});
    EXPECT_EQ(w["rows"], Json::parse(R"([["VW","2002"],["Kia","1997"]])")) << w.dump();
    EXPECT_EQ(w["source"], "cold");

    Json rev = post(svc, "/revise", {{"base", "c1"}, {"revising", "c2"},
                                     {"revising_dsl", "x.make = 'VW' AND y.make <> 'VW' AND x.year = y.year"},
                                     {"operator", "union"}, {"tc", true}, {"name", "cstar"}});
    EXPECT_EQ(rev["spo"], true);
    EXPECT_EQ(rev["tc_applied"], true);
    ASSERT_EQ(rev["compat"].size(), 3u);
    for (const auto& c : rev["compat"])
        EXPECT_EQ(c["compatible"], true);

    Json w2 = post(svc, "/winnow", {{"pref", "cstar"}, {"relation", "car"}});
    EXPECT_EQ(w2["rows"], Json::parse(R"([["VW","2002"]])"));
    EXPECT_EQ(w2["reused"], true);
    EXPECT_EQ(w2["reused_from"], "c1");

    Json session = svc.handle("GET", "/session", "").body;
    EXPECT_EQ(session["relations"].size(), 1u);
    EXPECT_GE(session["history"].size(), 4u);
}

TEST(Service, CheckCompatRankExtend)
{
    Session s = car_session();
    Service svc(s);
    post(svc, "/preferences", {{"name", "c3"},
                               {"dsl", "x.make = 'VW' AND x.year = 1999 AND y.make = 'Kia' AND y.year = 1999"}});
    EXPECT_EQ(post(svc, "/check", {{"pref", "c3"}, {"property", "wo"}})["holds"], false);
    EXPECT_EQ(post(svc, "/check", {{"pref", "c3"}, {"property", "io"}})["holds"], true);
    Json compat = post(svc, "/compat", {{"pref", "c1"}, {"against", "c2"}, {"level", 0}});
    EXPECT_EQ(compat["reports"][0]["compatible"], true);
    Json rank = post(svc, "/rank", {{"pref", "c1"}, {"relation", "car"}});
    EXPECT_EQ(rank["ranks"][1]["rank"], 2);
    Json ext = post(svc, "/extend-wo", {{"pref", "c3"}, {"expr", "E2"}, {"name", "c3wo"}});
    EXPECT_EQ(ext["stages"].back()["is_wo"], true);
    EXPECT_TRUE(ext.contains("result"));
}

TEST(Service, Update)
{
    Session s = car_session();
    Service svc(s);
    post(svc, "/winnow", {{"pref", "c1"}, {"relation", "car"}});
    Json u = post(svc, "/update", {{"relation", "car"}, {"insert", Json::parse(R"([["Kia", 2000]])")}});
    EXPECT_EQ(u["version"], 2);
    EXPECT_EQ(u["rows"].size(), 4u);
    EXPECT_EQ(u["results"][0]["reused"], true);
}

TEST(Service, ErrorPayloads)
{
    Session s = car_session();
    Service svc(s);
    Json e = post(svc, "/preferences", {{"name", "bad"}, {"dsl", "x.make > y.make"}, {"relation", "car"}}, 400);
    EXPECT_EQ(e["error"]["type"], "TypeError");
    Json syn = post(svc, "/preferences", {{"name", "bad"}, {"dsl", "x.make = AND"}, {"relation", "car"}}, 400);
    EXPECT_EQ(syn["error"]["type"], "SyntaxError");
    EXPECT_TRUE(syn["error"].contains("position"));
    Json csv = post(svc, "/relations", {{"name", "r"}, {"schema", "make:str, year:rat"}, {"csv", "make,year\nVW,abc\n"}},
                    400);
    EXPECT_EQ(csv["error"]["type"], "ValueParseError");
    EXPECT_EQ(csv["error"]["row"], 1);
    EXPECT_EQ(csv["error"]["column"], 2);
    EXPECT_EQ(svc.handle("GET", "/relations/nope", "").status, 404);
    EXPECT_EQ(svc.handle("POST", "/frobnicate", "{}").status, 404);
    EXPECT_EQ(svc.handle("POST", "/winnow", "not json").status, 400);
}

TEST(Service, SaveAndLoad)
{
    fs::path dir = temp_dir();
    Session s = car_session();
    Service svc(s);
    post(svc, "/session/save", {{"path", (dir / "svc.prefq").string()}});
    post(svc, "/preferences", {{"name", "extra"}, {"dsl", "x.year > y.year"}, {"relation", "car"}});
    Json loaded = post(svc, "/session/load", {{"path", (dir / "svc.prefq").string()}});
    EXPECT_EQ(loaded["preferences"].size(), 2u);
    Json err = post(svc, "/session/load", {{"path", (dir / "missing.prefq").string()}}, 400);
    EXPECT_EQ(err["error"]["type"], "IoError");
    EXPECT_EQ(svc.handle("GET", "/session", "").body["preferences"].size(), 2u);
}

TEST(Service, OverHttp)
{
    Session s = car_session();
    Service svc(s);
    const int port = svc.bind_any("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread server([&] { svc.listen_after_bind(); });
    svc.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    auto res = client.Post("/winnow", R"({"pref":"c1","relation":"car"})", "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(Json::parse(res->body)["rows"].size(), 2u);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    auto missing = client.Get("/relations/nope");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    svc.stop();
    server.join();
}

TEST(Service, GetIsPure)
{
    Session s = car_session();
    Service svc(s);
    post(svc, "/winnow", {{"pref", "c1"}, {"relation", "car"}});
    EXPECT_EQ(svc.handle("GET", "/session", "").body, svc.handle("GET", "/session", "").body);
    EXPECT_EQ(svc.handle("GET", "/relations/car", "").body, svc.handle("GET", "/relations/car", "").body);
}

TEST(Session, RefinedEqualsColdOnGoldenScript)
{
    Session warm = car_session();
    warm.winnow("c1", "car");
    warm.revise("c1", "c2", Composition::Union, TcMode::Force, false, "cstar");
    Session cold = car_session();
    cold.revise("c1", "c2", Composition::Union, TcMode::Force, false, "cstar");
    WinnowOutcome a = warm.winnow("cstar", "car"), b = cold.winnow("cstar", "car");
    EXPECT_EQ(a.source, WinnowSource::Refined);
    EXPECT_EQ(b.source, WinnowSource::Cold);
    EXPECT_EQ(a.result.tuples(), b.result.tuples());
}
