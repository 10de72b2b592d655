#include "fate421/workbench.hpp"

#include "fate421/errors.hpp"

#include <fstream>

namespace fate421 {

namespace {

bool starts_with(std::string_view text, std::string_view prefix) { return text.substr(0, prefix.size()) == prefix; }

}  // namespace

UtilitySpec parse_utility(std::string_view text, int faces) {
  if (text == "transfer") return UtilitySpec::transfer();
  if (text == "sumfaces") return UtilitySpec::sum_of_faces();
  if (starts_with(text, "goal:")) return UtilitySpec::one_goal(Combination::parse(text.substr(5), faces));
  if (starts_with(text, "goals:")) {
    std::vector<Combination> goals;
    std::string_view rest = text.substr(6);
    while (true) {
      auto plus = rest.find('+');
      goals.push_back(Combination::parse(rest.substr(0, plus), faces));
      if (plus == std::string_view::npos) break;
      rest = rest.substr(plus + 1);
    }
    return UtilitySpec::multi_goal(std::move(goals));
  }
  if (starts_with(text, "file:")) {
    const std::string path(text.substr(5));
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot read utility file '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError("utility file '" + path + "': " + e.what());
    }
    return UtilitySpec::from_json(j, faces);
  }
  throw InvalidConfig("unknown utility '" + std::string(text) +
                      "' (goal:G, goals:G+H, transfer, sumfaces or file:PATH)");
}

PolicySpec PolicySpec::parse(std::string_view text, const RoundConfig& round) {
  PolicySpec p;
  p.text = std::string(text);
  auto full_goal = [&](std::string_view g) {
    Combination goal = Combination::parse(g, round.faces);
    if (goal.norm() != round.dice)
      throw InvalidConfig("goal '" + goal.to_string() + "' must have " + std::to_string(round.dice) + " dice");
    return goal;
  };
  if (text == "optimal") {
    p.kind = Kind::optimal;
  } else if (starts_with(text, "ratchet:")) {
    p.kind = Kind::ratchet;
    p.goal = full_goal(text.substr(8));
  } else if (starts_with(text, "bernoulli:")) {
    p.kind = Kind::bernoulli;
    p.goal = full_goal(text.substr(10));
  } else if (starts_with(text, "goalid:")) {
    p.kind = Kind::goal_id;
    p.goal_id = PolicyConfig::parse(text, round.player);
  } else {
    throw InvalidConfig("unknown policy '" + std::string(text) +
                        "' (optimal, ratchet:G, bernoulli:G or goalid:hXsY[:rev])");
  }
  return p;
}

nlohmann::json value_json(const Rational& q, int digits) {
  return {{"decimal", to_decimal(q, digits)}, {"exact", to_string(q)}};
}

nlohmann::json value_json(const Extended& e, int digits) {
  if (e.is_negative_infinity()) return {{"decimal", "-inf"}, {"exact", "-inf"}};
  return value_json(e.value(), digits);
}

std::shared_ptr<const FateGraph> Workbench::graph(const RoundConfig& config) {
  config.validate();
  const auto key = std::make_tuple(config.dice, config.faces, config.casts, config.player, config.deadline());
  std::lock_guard lock(mutex_);
  auto& slot = graphs_[key];
  if (!slot) slot = std::make_shared<const FateGraph>(build_fate_graph(config));
  return slot;
}

std::shared_ptr<const ResultProbabilityTable> Workbench::table(Player player, int dice, int faces, int casts) {
  const auto key = std::make_tuple(player, dice, faces, casts);
  {
    std::lock_guard lock(mutex_);
    if (auto it = tables_.find(key); it != tables_.end()) return it->second;
  }
  auto t = obtain_table(player, dice, faces, casts, threads_);
  std::lock_guard lock(mutex_);
  return tables_.emplace(key, std::move(t)).first->second;
}

std::shared_ptr<const SolvedGraph> Workbench::solve(const RoundConfig& config, const UtilitySpec& utility) {
  std::optional<std::pair<std::string, std::string>> key;
  try {
    key.emplace(config.describe(), utility.to_json().dump());
  } catch (const Unsupported&) {
  }
  if (key) {
    std::lock_guard lock(mutex_);
    if (auto it = solutions_.find(*key); it != solutions_.end()) return it->second;
  }
  auto solved = std::make_shared<const SolvedGraph>(backward_induction(graph(config), utility, threads_));
  if (!key) return solved;
  std::lock_guard lock(mutex_);
  return solutions_.emplace(*key, std::move(solved)).first->second;
}

std::shared_ptr<const GoalIdentification> Workbench::goal_identification(const PolicySpec& policy,
                                                                        const UtilitySpec& utility,
                                                                        const RoundConfig& round) {
  if (policy.kind != PolicySpec::Kind::goal_id) throw PreconditionError("'" + policy.text + "' is not goalid");
  return std::make_shared<const GoalIdentification>(policy.goal_id, utility,
                                                    table(round.player, round.dice, round.faces, round.casts), round);
}

DecisionRule Workbench::rule(const PolicySpec& policy, const UtilitySpec& utility, const RoundConfig& round) {
  switch (policy.kind) {
    case PolicySpec::Kind::ratchet:
      return one_goal_rule(*policy.goal, round);
    case PolicySpec::Kind::bernoulli:
      return bernoulli_rule(*policy.goal, round);
    case PolicySpec::Kind::goal_id: {
      auto gi = goal_identification(policy, utility, round);
      return [gi](int time, const Combination& state, const Combination& event, std::span<const Combination> legal) {
        return gi->decide(time, state, event, legal);
      };
    }
    case PolicySpec::Kind::optimal:
      break;
  }
  auto solved = solve(round, utility);
  return [solved](int time, const Combination&, const Combination&, std::span<const Combination> legal) {
    std::optional<Extended> best;
    std::vector<Combination> argmax;
    for (const auto& t : legal) {
      const Extended& v = solved->value_at(time + 1, t);
      if (!best || v > *best) {
        best = v;
        argmax.assign(1, t);
      } else if (v == *best) {
        argmax.push_back(t);
      }
    }
    return lagrangian_min(argmax);
  };
}

Strategy Workbench::strategy(const PolicySpec& policy, const UtilitySpec& utility, const RoundConfig& round) {
  if (policy.kind == PolicySpec::Kind::optimal) return extract_pure_strategy(*solve(round, utility));
  return tabulate(*graph(round), rule(policy, utility, round), policy.text);
}

nlohmann::json EvaluationReport::to_json(int digits) const {
  nlohmann::json j;
  j["policy"] = policy;
  j["utility"] = utility;
  j["round"] = round.describe();
  j["exact"] = fate421::to_string(value);
  j["decimal"] = to_decimal(value, digits);
  j["optimum"] = value_json(optimum, digits);
  if (ratio) {
    j["ratio"] = to_decimal(*ratio, digits);
    j["ratio_exact"] = fate421::to_string(*ratio);
  } else {
    j["ratio"] = nullptr;
  }
  j["conservation"] = conservation.passed() ? "pass" : "fail";
  if (mc) {
    j["mc"] = {{"mean", mc->mean}, {"stderr", mc->standard_error}, {"samples", mc->samples}, {"seed", mc->seed}};
  } else {
    j["mc"] = nullptr;
  }
  return j;
}

EvaluationReport evaluate_policy(Workbench& bench, const PolicySpec& policy, const UtilitySpec& utility,
                                 const std::string& utility_text, const RoundConfig& round, std::uint64_t samples,
                                 std::uint64_t seed) {
  EvaluationReport r;
  r.policy = policy.text;
  r.utility = utility_text;
  r.round = round;
  const auto graph = bench.graph(round);
  const Strategy strategy = bench.strategy(policy, utility, round);
  r.value = kolmogorov_expectation(strategy, utility, *graph);
  r.optimum = bench.solve(RoundConfig::first(round.dice, round.faces, round.casts), utility)->root_value();
  if (r.optimum != 0) r.ratio = optimality_ratio(r.value, r.optimum);
  r.conservation = duality_check(strategy, utility, *graph);
  if (samples > 0) r.mc = monte_carlo(strategy, utility, round, samples, seed, bench.threads());
  return r;
}

}  // namespace fate421
