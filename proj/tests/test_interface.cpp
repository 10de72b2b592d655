#include "fate421/advice.hpp"
#include "fate421/bench.hpp"
#include "fate421/cli.hpp"
#include "fate421/errors.hpp"
#include "fate421/http_api.hpp"
#include "fate421/workbench.hpp"
#include "support.hpp"

#include <httplib.h>

#include <filesystem>
#include <sstream>
#include <thread>

using namespace fate421;
using nlohmann::json;
using testing::C;
using testing::Q;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args, const std::string& input = {}) {
  args.insert(args.begin(), "fate421");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::istringstream in(input);
  std::ostringstream out, err;
  const int status = run_cli(static_cast<int>(argv.size()), argv.data(), in, out, err);
  return {status, out.str(), err.str()};
}

std::shared_ptr<Workbench> shared_bench() {
  static const auto bench = std::make_shared<Workbench>(4);
  return bench;
}

const std::vector<BenchTable>& bench_tables() {
  static const auto tables = run_bench(*shared_bench());
  return tables;
}

json without_id(json j) {
  j.erase("id");
  return j;
}

const json transfer_session = {{"config", {{"dice", 3}, {"faces", 6}, {"casts", 3}, {"player", "first"}}},
                               {"policy", "goalid:h1s1"},
                               {"utility", "transfer"}};

}  // namespace

TEST_CASE("utility mini-language") {
  CHECK(parse_utility("goal:123", 6)(3, C("321")) == Extended(1L));
  CHECK(parse_utility("goals:123+224+345", 6)(3, C("422")) == Extended(1L));
  CHECK(parse_utility("transfer", 6)(3, C("421")) == Extended(10L));
  CHECK(parse_utility("sumfaces", 6)(3, C("666")) == Extended(18L));
  CHECK_THROWS(parse_utility("goal:7", 6));
  CHECK_THROWS(parse_utility("happiness", 6));

  const auto path = std::filesystem::temp_directory_path() / "fate421-utility.json";
  std::ofstream(path) << R"({"kind": "table", "values": {"*:421": "3/2"}})";
  CHECK(parse_utility("file:" + path.string(), 6)(3, C("421")) == Extended(Q("3/2")));
  std::filesystem::remove(path);
}

TEST_CASE("policy names") {
  const auto round = RoundConfig::first(3, 6, 3);
  CHECK(PolicySpec::parse("optimal", round).kind == PolicySpec::Kind::optimal);
  const auto r = PolicySpec::parse("ratchet:421", round);
  CHECK(r.kind == PolicySpec::Kind::ratchet);
  CHECK(*r.goal == C("421"));
  const auto g = PolicySpec::parse("goalid:h0s1", round);
  CHECK(g.kind == PolicySpec::Kind::goal_id);
  CHECK(g.goal_id.horizon == 0);
  CHECK(g.goal_id.serendipity == 1);
  CHECK_THROWS(PolicySpec::parse("ratchet:42", round));
  CHECK_THROWS(PolicySpec::parse("goalid:h2s0", round));
  CHECK_THROWS(PolicySpec::parse("greedy", round));
  CHECK_THROWS_AS(PolicySpec::parse("goalid:h1s1", RoundConfig::next(3, 6, 3, 3)), Unsupported);
}

TEST_CASE("cli solve") {
  const auto a = cli({"solve"});
  CHECK(a.status == 0);
  CHECK(a.out.find("0.22811") != std::string::npos);
  CHECK(a.out.find("42571/186624") != std::string::npos);

  const auto b = cli({"-u", "sumfaces", "solve", "--format", "json"});
  REQUIRE(b.status == 0);
  CHECK(json::parse(b.out)["value"]["exact"] == "14");
}

TEST_CASE("cli eval") {
  const auto a = cli({"-u", "transfer", "eval", "--policy", "goalid:h0s0"});
  REQUIRE(a.status == 0);
  const auto j = json::parse(a.out);
  CHECK(j["ratio"] == "0.90834");
  CHECK(j["ratio_exact"] == "952727/1048863");
  CHECK(j["conservation"] == "pass");

  const auto mc = cli({"-u", "goal:123", "eval", "--policy", "ratchet:123", "--samples", "20000", "--seed", "7"});
  REQUIRE(mc.status == 0);
  const auto m = json::parse(mc.out);
  CHECK(m["mc"]["samples"] == 20000);
  CHECK(std::abs(m["mc"]["mean"].get<double>() - 0.2281056) <= 4 * m["mc"]["stderr"].get<double>());
}

TEST_CASE("cli usage errors") {
  CHECK(cli({}).status == 2);
  CHECK(cli({"frobnicate"}).status == 2);
  CHECK(cli({"eval"}).status == 2);
  CHECK(cli({"-u", "goal:7", "solve"}).status == 2);
  CHECK(cli({"--player", "next", "--imposed", "3", "eval", "--policy", "goalid:h1s1"}).status == 2);
  CHECK(cli({"--faces", "0", "solve"}).status == 2);
  CHECK(cli({"--help"}).status == 0);
}

TEST_CASE("cli tables") {
  const auto a = cli({"tables", "-J", "2"});
  CHECK(a.status == 0);
  CHECK(a.out.find("fail") == std::string::npos);
  const auto csv = cli({"-J", "2", "tables", "--format", "csv"});
  CHECK(csv.status == 0);
  CHECK(csv.out.rfind("imposed,goal,result,delay,exact,decimal", 0) == 0);
}

TEST_CASE("benchmark tables") {
  const auto& tables = bench_tables();
  REQUIRE(tables.size() == 4);
  for (const auto& row : tables[0].rows) {
    REQUIRE(row.first);
    CHECK(*row.first == 1);
  }
  CHECK(tables[0].row("max-moy").next == Q("24631/42571"));
  CHECK(tables[1].row("max-moy").next == Q("180553/367333"));
  CHECK(tables[1].row("goalid:h0s0").first == Q("268291/367333"));
  CHECK(tables[2].row("goalid:h1s1").first == Q("348342/349621"));
  CHECK(tables[3].row("goalid:h1s1").first == Q("1007/1008"));
  CHECK(tables[3].row("goalid:h1s0").first == Q("3/4"));
  CHECK_FALSE(tables[3].row("goalid:h1s1").next);
  CHECK(tables[2].optimum == Q("349621/93312"));

  const auto text = format_bench(tables);
  CHECK(text == format_bench(run_bench(*std::make_shared<Workbench>(1))));
  CHECK(text.find("0.99634") != std::string::npos);
  CHECK(bench_json(tables).size() == 4);
}

TEST_CASE("http api session flow") {
  HttpApi api(std::make_shared<SessionStore>(shared_bench()));
  const auto created = api.handle("POST", "/sessions", transfer_session.dump());
  REQUIRE(created.status == 201);
  const std::string id = created.body["id"];
  CHECK(created.body["state"]["live"] == 3);

  const auto cast = api.handle("POST", "/sessions/" + id + "/events", R"({"event": "651"})");
  REQUIRE(cast.status == 200);
  const auto& advice = cast.body["advice"];
  CHECK(advice["decision"]["keep"] == "1");

  auto bench = shared_bench();
  const auto u = UtilitySpec::transfer();
  const auto round = RoundConfig::first(3, 6, 3);
  const auto gi = bench->goal_identification(PolicySpec::parse("goalid:h1s1", round), u, round);
  const auto legal = legal_decisions(round, 0, Combination(6), C("651"));
  CHECK(gi->decide(0, Combination(6), C("651"), legal) == C("1"));

  const auto bad = api.handle("POST", "/sessions/" + id + "/decisions", R"({"keep": "65x"})");
  CHECK(bad.status == 400);
  const auto taken = api.handle("POST", "/sessions/" + id + "/decisions", R"({"keep": "2"})");
  CHECK(taken.status == 422);
  CHECK(taken.body["rule"] == "keep-from-event");

  const auto kept = api.handle("POST", "/sessions/" + id + "/decisions", json{{"keep", advice["decision"]["keep"]}}.dump());
  REQUIRE(kept.status == 200);
  CHECK(kept.body["state"]["live"] == 2);
  CHECK(kept.body["state"]["state"] == "1");

  const auto wrong = api.handle("POST", "/sessions/" + id + "/events", R"({"event": "651"})");
  CHECK(wrong.status == 422);
  CHECK(wrong.body["rule"] == "recast-all-live-dice");

  const auto got = api.handle("GET", "/sessions/" + id, "");
  CHECK(got.status == 200);
  CHECK(got.body["history"].size() == 3);

  CHECK(api.handle("GET", "/sessions/nope", "").status == 404);
  CHECK(api.handle("GET", "/elsewhere", "").status == 404);
  CHECK(api.handle("PUT", "/sessions/" + id, "").status == 405);
  CHECK(api.handle("POST", "/sessions", "{not json").status == 400);
  CHECK(api.handle("DELETE", "/sessions/" + id, "").status == 200);
  CHECK(api.handle("GET", "/sessions/" + id, "").status == 404);
}

TEST_CASE("http api rejects a two-dice event on three live dice") {
  HttpApi api(std::make_shared<SessionStore>(shared_bench()));
  const std::string id = api.handle("POST", "/sessions", transfer_session.dump()).body["id"];
  const auto r = api.handle("POST", "/sessions/" + id + "/events", R"({"event": "65"})");
  CHECK(r.status == 422);
  CHECK(r.body["rule"] == "recast-all-live-dice");
  CHECK(api.handle("GET", "/sessions/" + id, "").body["state"]["live"] == 3);
}

TEST_CASE("sessions are isolated") {
  HttpApi api(std::make_shared<SessionStore>(shared_bench()));
  const std::string a = api.handle("POST", "/sessions", transfer_session.dump()).body["id"];
  const std::string b = api.handle("POST", "/sessions", transfer_session.dump()).body["id"];
  CHECK(a != b);
  api.handle("POST", "/sessions/" + a + "/events", R"({"event": "421"})");
  api.handle("POST", "/sessions/" + a + "/decisions", R"({"keep": "421"})");
  CHECK(api.handle("GET", "/sessions/" + a, "").body["state"]["finished"] == true);
  const auto other = api.handle("GET", "/sessions/" + b, "").body;
  CHECK(other["state"]["finished"] == false);
  CHECK(other["history"].size() == 1);
}

TEST_CASE("http server over a socket") {
  HttpApi api(std::make_shared<SessionStore>(shared_bench()));
  httplib::Server server;
  api.mount(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto created = client.Post("/sessions", transfer_session.dump(), "application/json");
  REQUIRE(created);
  CHECK(created->status == 201);
  const std::string id = json::parse(created->body)["id"];
  const auto cast = client.Post("/sessions/" + id + "/events", R"({"event": "651"})", "application/json");
  REQUIRE(cast);
  CHECK(json::parse(cast->body)["advice"]["decision"]["keep"] == "1");
  const auto bad = client.Post("/sessions/" + id + "/decisions", R"({"keep": "6"})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 200);
  const auto missing = client.Get("/sessions/s999");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  server.stop();
  worker.join();
}

TEST_CASE("terminal advisor matches the http session") {
  std::istringstream in("651\nok\n32\nok\n4\nok\n");
  std::ostringstream out;
  const auto terminal = advise_terminal(shared_bench(), RoundConfig::first(3, 6, 3), "goalid:h1s1", "transfer", in, out);
  REQUIRE(terminal->finished());

  HttpApi api(std::make_shared<SessionStore>(shared_bench()));
  const std::string id = api.handle("POST", "/sessions", transfer_session.dump()).body["id"];
  for (const auto* event : {"651", "32", "4"}) {
    const auto r = api.handle("POST", "/sessions/" + id + "/events", json{{"event", event}}.dump());
    REQUIRE(r.status == 200);
    api.handle("POST", "/sessions/" + id + "/decisions", json{{"keep", r.body["advice"]["decision"]["keep"]}}.dump());
  }
  const auto session = api.handle("GET", "/sessions/" + id, "").body;
  CHECK(without_id(session) == without_id(terminal->to_json()));
  CHECK(session["state"]["state"] == "421");
  CHECK(session["history"].size() <= 2 * 3 + 1);
  CHECK(out.str().find("round over: result 421, J1 = 3") != std::string::npos);
}

TEST_CASE("terminal advisor input handling") {
  std::istringstream in("\n65\n421\n\n421\n");
  std::ostringstream out;
  const auto s = advise_terminal(shared_bench(), RoundConfig::first(3, 6, 3), "goalid:h1s1", "transfer", in, out);
  REQUIRE(s->finished());
  const std::string text = out.str();
  CHECK(text.find("rejected (recast-all-live-dice)") != std::string::npos);
  CHECK(text.find("round over: result 421, J1 = 1, hierarchic rank 1 of 56") != std::string::npos);
  CHECK(s->to_json()["history"].size() == 3);
}

TEST_CASE("session snapshots survive a restart") {
  const auto path = std::filesystem::temp_directory_path() / "fate421-sessions.json";
  std::filesystem::remove(path);
  std::string id;
  json before;
  {
    HttpApi api(std::make_shared<SessionStore>(shared_bench(), 5, path));
    id = api.handle("POST", "/sessions", transfer_session.dump()).body["id"];
    api.handle("POST", "/sessions/" + id + "/events", R"({"event": "651"})");
    api.handle("POST", "/sessions/" + id + "/decisions", R"({"keep": "6"})");
    before = api.handle("GET", "/sessions/" + id, "").body;
  }
  HttpApi again(std::make_shared<SessionStore>(shared_bench(), 5, path));
  const auto after = again.handle("GET", "/sessions/" + id, "");
  CHECK(after.status == 200);
  CHECK(after.body == before);
  const std::string fresh = again.handle("POST", "/sessions", transfer_session.dump()).body["id"];
  CHECK(fresh != id);
  std::filesystem::remove(path);
}

TEST_CASE("advice of the optimal policy on the next player") {
  SessionStore store(shared_bench());
  const auto s = store.create({{"config", {{"player", "next"}, {"imposed", 3}}}, {"policy", "optimal"}, {"utility", "goal:421"}});
  CHECK(s->advice()["expected_value"]["exact"] == "24631/186624");
  s->cast("421");
  const auto keep = s->recommended_keep();
  REQUIRE(keep);
  CHECK(*keep == "21");
  CHECK_THROWS_AS(s->keep("421"), RuleViolation);
  const auto advice = s->advice();
  CHECK(advice["expected_value"]["exact"] == "1/6");
}
