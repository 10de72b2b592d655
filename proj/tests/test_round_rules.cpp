#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"
#include "fate421/round_rules.hpp"
#include "fate421/utility.hpp"
#include "support.hpp"

#include <algorithm>

using namespace fate421;
using testing::C;
using testing::Q;

namespace {

std::vector<Combination> layer_states(const FateGraph& g, int j) {
  std::vector<Combination> out;
  for (const auto& n : g.layer(j)) out.push_back(n.state);
  return out;
}

std::string rule_of(const RoundConfig& config, int time, const Combination& state, const Combination& event,
                    const Combination& successor) {
  try {
    check_decision(config, time, state, event, successor);
  } catch (const RuleViolation& e) {
    return e.rule();
  }
  return {};
}

}  // namespace

TEST_CASE("legal decisions") {
  const auto first = RoundConfig::first(3, 6, 3);
  CHECK(legal_decisions(first, 0, Combination(6), C("651")).size() == 8);

  const auto pair = legal_decisions(RoundConfig::first(2, 6, 3), 0, Combination(6), C("11"));
  CHECK(pair == std::vector<Combination>{Combination(6), C("1"), C("11")});

  const auto next = RoundConfig::next(3, 6, 3, 3);
  CHECK(legal_decisions(next, 1, C("42"), C("1")) == std::vector<Combination>{C("42")});
}

TEST_CASE("cast and decision rules are named") {
  const auto first = RoundConfig::first(3, 6, 3);
  try {
    legal_decisions(first, 0, Combination(6), C("65"));
    FAIL("a two-dice event with three live dice was accepted");
  } catch (const RuleViolation& e) {
    CHECK(e.rule() == "recast-all-live-dice");
  }
  CHECK_THROWS_AS(legal_decisions(first, 1, C("421"), Combination(6)), RuleViolation);
  CHECK(rule_of(first, 0, Combination(6), C("651"), C("2")) == "keep-from-event");
  CHECK(rule_of(first, 2, C("4"), C("21"), C("42")) == "last-cast");
  CHECK(rule_of(RoundConfig::next(3, 6, 3, 3), 0, Combination(6), C("421"), C("421")) == "imposed-duration");
  CHECK(rule_of(first, 0, Combination(6), C("421"), C("421")).empty());
}

TEST_CASE("fate graph layers") {
  const auto tiny = build_fate_graph(RoundConfig::first(1, 2, 1));
  CHECK(layer_states(tiny, 1) == std::vector<Combination>{C("2", 2), C("1", 2)});

  const auto two = build_fate_graph(RoundConfig::first(1, 2, 2));
  auto l1 = layer_states(two, 1);
  std::sort(l1.begin(), l1.end(), lagrangian_less);
  CHECK(l1 == std::vector<Combination>{Combination(2), C("1", 2), C("2", 2)});

  const auto g = build_fate_graph(RoundConfig::first(3, 6, 3));
  CHECK(g.layer(1).size() == 84);
  CHECK(g.node_count() == 225);
  CHECK(build_fate_graph(RoundConfig::next(3, 6, 3, 3)).node_count() == 113);
}

TEST_CASE("fate graph structure") {
  for (const auto& config : {RoundConfig::first(3, 6, 3), RoundConfig::next(3, 6, 3, 3), RoundConfig::next(3, 6, 3, 2),
                             RoundConfig::first(2, 2, 4), RoundConfig::first(3, 2, 3)}) {
    CAPTURE(config.describe());
    const auto g = build_fate_graph(config);
    const auto bound = combinations_up_to(config.dice, config.faces).size();
    for (int j = 0; j <= g.last_layer(); ++j) {
      CHECK(g.layer(j).size() <= bound);
      CHECK(std::is_sorted(g.layer(j).begin(), g.layer(j).end(),
                           [](const FateNode& a, const FateNode& b) { return a.state < b.state; }));
      for (const auto& node : g.layer(j)) {
        const bool full = node.state.norm() == config.dice;
        if (config.player == Player::first && j == config.casts) CHECK(full);
        if (config.player == Player::next && full) CHECK(j >= config.imposed);
        if (j == g.last_layer()) continue;
        Rational mass(0);
        for (const auto& e : node.events) {
          mass += e.probability;
          CHECK(e.cast.norm() == config.dice - node.state.norm());
          for (int s : e.successors) {
            const auto& succ = g.node(j + 1, s).state;
            CHECK(node.state.within(succ));
            CHECK((succ - node.state).within(e.cast));
          }
        }
        CHECK(mass == 1);
        if (full) {
          REQUIRE(node.events.size() == 1);
          CHECK(node.events[0].cast.empty());
          CHECK(g.node(j + 1, node.events[0].successors[0]).state == node.state);
        }
      }
    }
  }
}

TEST_CASE("node count stays bounded as J grows") {
  std::size_t previous = 0;
  for (int J = 1; J <= 6; ++J) {
    const auto n = build_fate_graph(RoundConfig::first(3, 6, J)).node_count();
    if (J > 2) CHECK(n - previous <= 84);
    previous = n;
  }
}

TEST_CASE("round config validation") {
  CHECK_NOTHROW(RoundConfig::first(0, 6, 3).validate());
  CHECK_NOTHROW(RoundConfig::first(3, 6, 0).validate());
  CHECK_THROWS_AS(RoundConfig::first(-1, 6, 3).validate(), InvalidConfig);
  CHECK_THROWS_AS(RoundConfig::first(3, 0, 3).validate(), InvalidConfig);
  CHECK_THROWS_AS(RoundConfig::next(3, 6, 3, 4).validate(), InvalidConfig);
  CHECK_THROWS_AS(RoundConfig::next(3, 6, 3, 0).validate(), InvalidConfig);
  CHECK_THROWS_AS(parse_player("third"), InvalidConfig);
}

TEST_CASE("renormalize") {
  const auto config = RoundConfig::first(3, 6, 3);
  CHECK(renormalize(RoundState{0, Combination(6)}, config) == config);
  const auto sub = renormalize(RoundState{1, C("4")}, config);
  CHECK(sub.dice == 2);
  CHECK(sub.casts == 2);
  CHECK(sub.player == Player::first);
}

TEST_CASE("utilities") {
  CHECK(UtilitySpec::one_goal(C("123"))(3, C("123")) == Extended(1L));
  CHECK(UtilitySpec::one_goal(C("123"))(3, C("124")) == Extended(0L));
  CHECK(UtilitySpec::transfer()(3, C("421")) == Extended(10L));
  CHECK(UtilitySpec::sum_of_faces()(3, C("652")) == Extended(13L));
  const auto three = UtilitySpec::multi_goal({C("123"), C("224"), C("345")});
  CHECK(three(3, C("422")) == Extended(1L));
  CHECK(three(3, C("666")) == Extended(0L));
  CHECK(UtilitySpec::multi_goal({C("123"), C("123")})(3, C("321")) == Extended(2L));
}

TEST_CASE("table utilities and their file form") {
  const auto j = nlohmann::json::parse(R"({"kind": "table", "values": {"3:421": "5/2", "*:111": "-inf", "*:654": "1"}})");
  const auto u = UtilitySpec::from_json(j, 6);
  CHECK(u(3, C("421")) == Extended(Q("5/2")));
  CHECK(u(7, C("111")).is_negative_infinity());
  CHECK(u(0, C("654")) == Extended(1L));
  CHECK_THROWS_AS(u(2, C("421")), UtilityUndefined);
  CHECK_THROWS_AS(u(3, C("222")), UtilityUndefined);
  const auto again = UtilitySpec::from_json(u.to_json(), 6);
  CHECK(again(3, C("421")) == Extended(Q("5/2")));
  CHECK(again(1, C("111")).is_negative_infinity());

  for (const auto& text : {R"({"kind": "one-goal", "goals": ["421"]})", R"({"kind": "transfer"})",
                           R"({"kind": "sum-of-faces"})", R"({"kind": "multi-goal", "goals": ["123", "224"]})"}) {
    const auto v = UtilitySpec::from_json(nlohmann::json::parse(text), 6);
    CHECK(UtilitySpec::from_json(v.to_json(), 6).describe() == v.describe());
  }
  CHECK_THROWS(UtilitySpec::from_json(nlohmann::json::parse(R"({"kind": "mystery"})"), 6));
}

TEST_CASE("restricted utility") {
  const auto u = UtilitySpec::sum_of_faces().restricted(1, C("6"));
  CHECK(u(2, C("54")) == Extended(15L));
}
