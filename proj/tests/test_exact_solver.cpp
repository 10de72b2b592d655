#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"
#include "fate421/evaluator.hpp"
#include "fate421/policy_engine.hpp"
#include "fate421/solver.hpp"
#include "brute_force.hpp"
#include "support.hpp"

#include <algorithm>
#include <random>

using namespace fate421;
using testing::BruteForce;
using testing::C;
using testing::Q;

namespace {

UtilitySpec random_table(int dice, int faces, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(-20, 20), den(1, 7);
  std::map<Combination, Extended> values;
  for (const auto& c : combinations_of_norm(dice, faces)) values[c] = Extended(Rational(num(rng), den(rng)));
  return UtilitySpec::table({}, values);
}

std::vector<UtilitySpec> oracle_utilities(int dice, int faces) {
  std::vector<UtilitySpec> out{UtilitySpec::sum_of_faces()};
  for (const auto& g : combinations_of_norm(dice, faces)) out.push_back(UtilitySpec::one_goal(g));
  for (std::uint32_t s = 1; s <= 3; ++s) out.push_back(random_table(dice, faces, s));
  return out;
}

}  // namespace

TEST_CASE("backward induction equals brute force at toy scale") {
  for (auto [D, F, J] : {std::tuple{1, 2, 2}, std::tuple{2, 2, 2}, std::tuple{1, 6, 2}, std::tuple{2, 3, 3}}) {
    std::vector<RoundConfig> configs{RoundConfig::first(D, F, J)};
    for (int J1 = 1; J1 <= J; ++J1) configs.push_back(RoundConfig::next(D, F, J, J1));
    for (const auto& config : configs)
      for (const auto& u : oracle_utilities(D, F)) {
        CAPTURE(config.describe());
        CAPTURE(u.describe());
        CHECK(optimal_value(config, u) == BruteForce{config, u}.value(0, {}));
      }
  }
}

TEST_CASE("root value examples") {
  const auto six = UtilitySpec::one_goal(C("6"));
  CHECK(optimal_value(RoundConfig::first(1, 6, 2), six) == Q("11/36"));
  const Rational v = optimal_value(RoundConfig::first(3, 6, 3), UtilitySpec::one_goal(C("123")));
  CHECK(v == Q("42571/186624"));
  CHECK(to_decimal(v, 5) == "0.22811");

  std::map<std::pair<int, Combination>, Extended> at_origin{{{0, Combination(6)}, Extended(5L)}};
  CHECK(optimal_value(RoundConfig::first(3, 6, 0), UtilitySpec::table(at_origin)) == 5);
  CHECK(optimal_value(RoundConfig::first(0, 6, 3), UtilitySpec::sum_of_faces()) == 0);
}

TEST_CASE("optimal values of the benchmark utilities") {
  const auto first = RoundConfig::first(3, 6, 3);
  const auto next = RoundConfig::next(3, 6, 3, 3);
  const auto one = UtilitySpec::one_goal(C("123"));
  const Rational ratio = optimal_value(next, one) / optimal_value(first, one);
  CHECK(ratio == Q("24631/42571"));
  CHECK(to_decimal(ratio, 5, Rounding::truncate) == "0.57858");
  CHECK(optimal_value(first, UtilitySpec::sum_of_faces()) == 14);
  const Rational transfer = optimal_value(first, UtilitySpec::transfer());
  CHECK(transfer == Q("349621/93312"));
  CHECK(rounded_like(transfer, "3.7467", Rounding::truncate) == "3.7467");
}

TEST_CASE("exchanged alternation gives the same root value") {
  for (const auto& config : {RoundConfig::first(2, 2, 2), RoundConfig::first(2, 3, 3), RoundConfig::next(2, 3, 3, 2),
                             RoundConfig::first(3, 6, 3), RoundConfig::next(3, 6, 3, 3)})
    for (const auto& u : {UtilitySpec::sum_of_faces(), random_table(config.dice, config.faces, 11)}) {
      const auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
      CHECK(exchanged_root_value(*graph, u) == backward_induction(graph, u).root_value());
    }
}

TEST_CASE("larger utilities give larger values") {
  const auto config = RoundConfig::first(3, 6, 3);
  const Rational small = optimal_value(config, UtilitySpec::one_goal(C("123")));
  const Rational large = optimal_value(config, UtilitySpec::multi_goal({C("123"), C("224"), C("345")}));
  CHECK(small <= large);
}

TEST_CASE("node values equal the optimum of the renormalized round") {
  const auto config = RoundConfig::first(3, 6, 3);
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
  for (const auto& u : {UtilitySpec::one_goal(C("123")), UtilitySpec::transfer()}) {
    const auto solved = backward_induction(graph, u);
    for (int j = 0; j <= graph->last_layer(); ++j)
      for (const auto& node : graph->layer(j)) {
        const auto sub = renormalize(RoundState{j, node.state}, config);
        CHECK(solved.value_at(j, node.state).value() == optimal_value(sub, u.restricted(j, node.state)));
      }
  }
}

TEST_CASE("threads do not change values") {
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(RoundConfig::first(3, 6, 3)));
  const auto u = UtilitySpec::transfer();
  const auto one = backward_induction(graph, u, 1);
  const auto four = backward_induction(graph, u, 4);
  CHECK(one.value == four.value);
  CHECK(one.optimal == four.optimal);
}

TEST_CASE("extracted strategy is the ratchet for one-goal utilities") {
  const auto config = RoundConfig::first(3, 6, 3);
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
  for (const auto& goal : combinations_of_norm(3, 6)) {
    CAPTURE(goal.to_string());
    const Strategy optimal = extract_pure_strategy(backward_induction(graph, UtilitySpec::one_goal(goal)));
    const Strategy ratchet = tabulate(*graph, one_goal_rule(goal, config), "ratchet");
    for (const auto& [key, decision] : ratchet.decisions()) {
      const Decision* other = optimal.find(key);
      REQUIRE(other);
      CHECK(std::get<Combination>(*other) == std::get<Combination>(decision));
    }
  }
}

TEST_CASE("next-player dilemma: optimal set and extraction") {
  const auto config = RoundConfig::next(3, 6, 3, 3);
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
  const auto solved = backward_induction(graph, UtilitySpec::one_goal(C("421")));
  const auto& origin = graph->node(0, 0);
  const auto event = std::find_if(origin.events.begin(), origin.events.end(),
                                  [](const FateEvent& e) { return e.cast == C("421"); });
  REQUIRE(event != origin.events.end());
  std::vector<Combination> optimal;
  for (int s : solved.optimal[0][0][static_cast<std::size_t>(event - origin.events.begin())])
    optimal.push_back(graph->node(1, s).state);
  std::sort(optimal.begin(), optimal.end());
  std::vector<Combination> expected{C("42"), C("41"), C("21")};
  std::sort(expected.begin(), expected.end());
  CHECK(optimal == expected);
  const Strategy s = extract_pure_strategy(solved);
  CHECK(std::get<Combination>(*s.find({0, Combination(6), C("421")})) == C("21"));
}

TEST_CASE("absorbing nodes keep their state") {
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(RoundConfig::first(3, 6, 3)));
  const Strategy s = extract_pure_strategy(backward_induction(graph, UtilitySpec::transfer()));
  CHECK(std::get<Combination>(*s.find({1, C("421"), Combination(6)})) == C("421"));
  CHECK(std::get<Combination>(*s.find({2, C("666"), Combination(6)})) == C("666"));
}

TEST_CASE("extracted strategy evaluates to the optimum") {
  for (const auto& config : {RoundConfig::first(3, 6, 3), RoundConfig::next(3, 6, 3, 3), RoundConfig::next(3, 6, 3, 2)})
    for (const auto& u : {UtilitySpec::one_goal(C("123")), UtilitySpec::multi_goal({C("123"), C("224"), C("345")}),
                          UtilitySpec::transfer(), UtilitySpec::sum_of_faces()}) {
      const auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
      const auto solved = backward_induction(graph, u);
      CHECK(kolmogorov_expectation(extract_pure_strategy(solved), u, *graph) == solved.root_value());
    }
}

TEST_CASE("a minus-infinity optimum is a diagnostic") {
  std::map<Combination, Extended> values;
  for (const auto& c : combinations_of_norm(2, 2)) values[c] = Extended::negative_infinity();
  const auto graph = std::make_shared<const FateGraph>(build_fate_graph(RoundConfig::first(2, 2, 2)));
  const auto solved = backward_induction(graph, UtilitySpec::table({}, values));
  CHECK_THROWS_AS(solved.root_value(), Diagnostic);

  values[C("22", 2)] = Extended(1L);
  const auto partly = backward_induction(graph, UtilitySpec::table({}, values));
  CHECK_THROWS_AS(partly.root_value(), Diagnostic);
}
