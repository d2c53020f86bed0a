#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <httplib.h>

#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "skm/cli.hpp"
#include "skm/error.hpp"

using namespace skm;

namespace {

const std::string autoreg = oracle::data_path("autoregulation.rxn");
const std::string chain_file = oracle::data_path("chain.rxn");

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
    std::istringstream in(input);
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, in, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

Json call(Api& api, const std::string& method, const std::string& path, const std::string& body = "",
          int expect = 200, const std::map<std::string, std::string>& query = {}) {
    auto r = api.handle(method, path, query, body);
    CHECK_MESSAGE(r.status == expect, r.body.dump());
    CHECK(r.body.contains("revision"));
    return r.body;
}

std::set<std::set<std::string>> cluster_sets(const Json& tree) {
    std::set<std::set<std::string>> out;
    for (const auto& c : tree["clusters"]) {
        std::set<std::string> s;
        for (const auto& id : c) s.insert(id.get<std::string>());
        out.insert(s);
    }
    return out;
}

}  // namespace

TEST_CASE("validate") {
    auto bad = run({"validate", autoreg});
    CHECK(bad.code == exit_failed);
    CHECK(bad.out.find("standard.iv") != std::string::npos);
    auto json = run({"validate", autoreg, "--format", "json"});
    CHECK(Json::parse(json.out)["passed"] == false);
    CHECK(run({"validate", autoreg, "--normalize"}).code == exit_ok);
    CHECK(run({"validate", chain_file}).code == exit_ok);
    auto missing = run({"validate", "/nonexistent/file.rxn"});
    CHECK(missing.code == exit_failed);
    CHECK(missing.err.find("error[") != std::string::npos);
}

TEST_CASE("kig exports") {
    auto dot = run({"kig", autoreg});
    CHECK(dot.code == exit_ok);
    std::size_t arrows = 0;
    for (std::size_t p = dot.out.find("->"); p != std::string::npos; p = dot.out.find("->", p + 1)) ++arrows;
    CHECK(arrows == 10);
    auto chain = run({"kig", chain_file});
    arrows = 0;
    for (std::size_t p = chain.out.find("->"); p != std::string::npos; p = chain.out.find("->", p + 1)) ++arrows;
    CHECK(arrows == 3);

    auto json = Json::parse(run({"kig", autoreg, "--undirected", "--format", "json"}).out);
    CHECK(json["edges"].size() == 6);
    CHECK(run({"kig", autoreg, "--variant", "moral"}).out.find("graph kig") == 0);
    CHECK(run({"kig", autoreg, "--variant", "cubist"}).code == exit_usage);
}

TEST_CASE("modularize: MPD and the equivalent script") {
    auto mpd = run({"modularize", autoreg, "--mpd"});
    REQUIRE(mpd.code == exit_ok);
    auto j = Json::parse(mpd.out);
    CHECK(cluster_sets(j["tree"]) == std::set<std::set<std::string>>{{"P", "R", "g", "P2"}, {"g", "P2", "gP2"}});
    CHECK(j["report"]["verdict"] == "certified");

    auto cliques = Json::parse(run({"modularize", autoreg}).out);
    CHECK(cliques["tree"]["clusters"].size() == 3);
    auto scripted = Json::parse(run({"modularize", autoreg, "--script", "1:2"}).out);
    CHECK(cluster_sets(scripted["tree"]) == cluster_sets(j["tree"]));
    CHECK(scripted["report"] == j["report"]);

    auto err = run({"modularize", autoreg, "--script", "1:3"});
    CHECK(err.code == exit_failed);
    CHECK(err.err.find("not-adjacent") != std::string::npos);
    CHECK(run({"modularize", autoreg, "--script", "1-2"}).code == exit_failed);
    CHECK(run({"modularize", autoreg, "--mpd", "--markdown"}).out.find("certified") != std::string::npos);
    CHECK(run({"modularize", autoreg, "--format", "dot"}).out.find("graph") != std::string::npos);
    CHECK(run({"modularize", "--bogus"}).code == exit_usage);
}

TEST_CASE("modularize is byte-stable") {
    CHECK(run({"modularize", autoreg, "--mpd"}).out == run({"modularize", autoreg, "--mpd"}).out);
    CHECK(run({"kig", autoreg, "--format", "json"}).out == run({"kig", autoreg, "--format", "json"}).out);
}

TEST_CASE("interactive session") {
    auto r = run({"modularize", autoreg, "--interactive", "--format", "text"},
                 "list\naggregate 1 3\naggregate 1 2\nundo\nredo\ncopy P 1 3\nfrobnicate\nquit\n");
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("error[not-adjacent]") != std::string::npos);
    CHECK(r.out.find("unknown command 'frobnicate'") != std::string::npos);
    CHECK(r.out.find("C1") != std::string::npos);
}

TEST_CASE("simulate") {
    auto one = run({"simulate", chain_file, "--x0", "A=5", "--t-end", "2", "--seed", "3"});
    REQUIRE(one.code == exit_ok);
    auto j = Json::parse(one.out);
    REQUIRE_FALSE(j["events"].empty());
    for (const auto& e : j["events"]) CHECK(std::set<std::string>{"f", "r", "irr"}.count(e["reaction"].get<std::string>()));
    CHECK(one.out == run({"simulate", chain_file, "--x0", "A=5", "--t-end", "2", "--seed", "3"}).out);
    auto csv = run({"simulate", chain_file, "--x0", "A=5", "--t-end", "2", "--seed", "3", "--format", "csv"});
    CHECK(csv.out.rfind("time,reaction\n", 0) == 0);

    auto many = Json::parse(
        run({"simulate", chain_file, "--x0", "A=5", "--t-end", "1", "--replicas", "200", "--seed", "3"}).out);
    CHECK(many["replicas"] == 200);
    CHECK(many["final_state"].contains("A"));

    auto proj = Json::parse(run({"simulate", chain_file, "--x0", "A=5", "--project", "Dstar:A;B;D"}).out);
    CHECK(proj["components"].size() == 3);
    CHECK(run({"simulate", chain_file, "--x0", "Q=5"}).code == exit_failed);
    CHECK(run({"simulate"}).code == exit_usage);
}

TEST_CASE("verify") {
    auto ok = run({"verify", autoreg, "--partition", "P,R;gP2;g,P2", "--reconstruct", "50", "--t-end", "3"});
    CHECK(ok.code == exit_ok);
    auto j = Json::parse(ok.out);
    CHECK(j["certified"] == true);
    CHECK(j["reconstruction"]["exact"] == true);
    CHECK(j["partition"].dump().find("history") != std::string::npos);

    auto chain = run({"verify", chain_file, "--partition", "A;B;D", "--reconstruct", "50", "--format", "text"});
    CHECK(chain.code == exit_ok);
    CHECK(chain.out.find("separator history equal: no") != std::string::npos);
    CHECK(chain.out.find("reconstruction exact: yes") != std::string::npos);

    auto split = run({"verify", autoreg, "--partition", "P;gP2;R,g,P2"});
    CHECK(split.code == exit_ok);
    auto bad = run({"verify", autoreg, "--partition", "P,R;gP2,P2;g"});
    CHECK(bad.code == exit_failed);
    CHECK(Json::parse(bad.out)["certified"] == false);

    auto frat = run({"verify", autoreg, "--partition", "P,R;gP2;g,P2", "--fraternized", "--format", "text"});
    CHECK(frat.out.find("(not required)") != std::string::npos);
    CHECK(run({"verify", autoreg}).code == exit_usage);
}

TEST_CASE("API matches the CLI and supports undo") {
    Session session(load_network(autoreg));
    Api api(session);
    auto net = call(api, "GET", "/network");
    CHECK(net["revision"] == 0);
    CHECK(net["network"]["species"].size() == 5);

    CHECK(call(api, "GET", "/kig", "", 200, {{"variant", "undirected"}})["kig"]["edges"].size() == 6);
    call(api, "GET", "/kig", "", 422, {{"variant", "sideways"}});

    auto before = call(api, "GET", "/tree");
    auto after = call(api, "POST", "/aggregate", R"({"i": 1, "j": 2})");
    CHECK(after["revision"] == 1);
    auto scripted = Json::parse(run({"modularize", autoreg, "--script", "1:2"}).out);
    CHECK(after["tree"] == scripted["tree"]);
    CHECK(after["report"] == scripted["report"]);
    CHECK(after["modularization"] == scripted["modularization"]);

    auto undone = call(api, "POST", "/undo");
    CHECK(undone["tree"] == before["tree"]);
    CHECK(undone["revision"] == 2);
    auto redone = call(api, "POST", "/redo");
    CHECK(redone["tree"] == after["tree"]);
    call(api, "POST", "/redo", "", 422);

    auto err = call(api, "POST", "/aggregate", R"({"i": 1, "j": 9})", 422);
    CHECK(err["error"]["code"] == "unknown-cluster");
    call(api, "POST", "/aggregate", R"({"i": "one"})", 422);
    call(api, "POST", "/aggregate", "{nope", 400);
    call(api, "POST", "/simulate", R"({"t_end": "soon"})", 400);
    call(api, "GET", "/nowhere", "", 404);
    call(api, "DELETE", "/tree", "", 405);

    auto copied = call(api, "POST", "/copy", R"({"moves": [{"species": "P", "from": 1, "to": 3}]})");
    bool found = false;
    for (const auto& m : copied["modularization"]["modules"])
        if (m["id"] == 3) found = std::find(m["separator"].begin(), m["separator"].end(), "P") != m["separator"].end();
    CHECK(found);
    call(api, "POST", "/copy", R"({"moves": [{"species": "P", "from": 1, "to": 3}]})", 422);

    auto sep = call(api, "GET", "/separation", "", 200, {{"a", "P,R"}, {"b", "gP2"}, {"d", "g,P2"}});
    CHECK(sep["graphical"] == true);
    CHECK(sep["chemical"] == true);

    auto reset = call(api, "POST", "/reset", R"({"mode": "mpd"})");
    CHECK(reset["tree"]["clusters"].size() == 2);
    auto report = call(api, "GET", "/report");
    CHECK(report["report"]["verdict"] == "certified");
    auto sim = call(api, "POST", "/simulate", R"({"x0": {"g": 1, "P": 4}, "t_end": 1, "replicas": 20, "seed": 4})");
    CHECK(sim["summary"]["replicas"] == 20);
    CHECK(call(api, "GET", "/modularization")["revision"] == reset["revision"]);
}

TEST_CASE("separation probe on the three-species chain") {
    Session session(load_network(chain_file));
    Api api(session);
    auto sep = call(api, "GET", "/separation", "", 200, {{"a", "A"}, {"b", "B"}});
    CHECK(sep["graphical"] == false);
    CHECK(sep["chemical"] == false);
    CHECK(sep["witness"].size() == 3);
    call(api, "GET", "/separation", "", 422, {{"a", "A"}, {"b", "A"}});
}

TEST_CASE("HTTP server round trip") {
    Session session(load_network(autoreg));
    Api api(session);
    HttpServer server(api);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread worker([&] { server.listen(); });

    httplib::Client client("127.0.0.1", port);
    for (int i = 0; i < 50 && !client.Get("/network"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(20));

    auto net = client.Get("/network");
    REQUIRE(net);
    CHECK(net->status == 200);
    CHECK(net->get_header_value("Access-Control-Allow-Origin") == "*");
    CHECK(Json::parse(net->body)["network"]["reactions"].size() == 6);

    auto agg = client.Post("/aggregate", R"({"i": 1, "j": 2})", "application/json");
    REQUIRE(agg);
    CHECK(agg->status == 200);
    CHECK(Json::parse(agg->body)["tree"]["clusters"].size() == 2);

    auto bad = client.Post("/aggregate", R"({"i": 1, "j": 2})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(Json::parse(bad->body)["error"]["code"] == "unknown-cluster");

    auto sep = client.Get("/separation?a=P,R&b=gP2&d=g,P2");
    REQUIRE(sep);
    CHECK(Json::parse(sep->body)["graphical"] == true);

    auto put = client.Put("/tree", "{}", "application/json");
    REQUIRE(put);
    CHECK(put->status == 405);

    // concurrent readers see a consistent revision
    std::vector<std::thread> readers;
    std::atomic<int> ok{0};
    for (int t = 0; t < 4; ++t)
        readers.emplace_back([&] {
            httplib::Client c("127.0.0.1", port);
            for (int i = 0; i < 10; ++i) {
                auto r = c.Get("/report");
                if (r && r->status == 200 && Json::parse(r->body)["revision"] == 1) ++ok;
            }
        });
    for (auto& t : readers) t.join();
    CHECK(ok == 40);

    server.stop();
    worker.join();
}
