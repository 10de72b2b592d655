#include "fate421/policy_engine.hpp"

#include "fate421/errors.hpp"
#include "fate421/result_tables.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace fate421 {

void PolicyConfig::validate() const {
  if (horizon < 0) throw InvalidConfig("horizon must be >= 0");
  if (horizon > 1) throw Unsupported("horizons beyond 1 are not implemented");
  if (serendipity != 0 && serendipity != 1) throw InvalidConfig("serendipity bit must be 0 or 1");
  if (serendipity == 1 && player == Player::next)
    throw Unsupported("the serendipitous evaluation function cannot be used for next players");
}

std::string PolicyConfig::name() const {
  return "goalid:h" + std::to_string(horizon) + "s" + std::to_string(serendipity);
}

PolicyConfig PolicyConfig::parse(std::string_view text, Player player) {
  constexpr std::string_view prefix = "goalid:";
  if (text.substr(0, prefix.size()) != prefix) throw InvalidConfig("not a goal-identification policy: '" + std::string(text) + "'");
  std::string_view rest = text.substr(prefix.size());
  bool revise = false;
  if (auto colon = rest.find(':'); colon != std::string_view::npos) {
    if (rest.substr(colon + 1) != "rev") throw InvalidConfig("unknown policy option in '" + std::string(text) + "'");
    revise = true;
    rest = rest.substr(0, colon);
  }
  if (rest.size() != 4 || rest[0] != 'h' || rest[2] != 's' || !std::isdigit(static_cast<unsigned char>(rest[1])) ||
      !std::isdigit(static_cast<unsigned char>(rest[3])))
    throw InvalidConfig("policy must read goalid:h{0|1}s{0|1}[:rev], got '" + std::string(text) + "'");
  PolicyConfig pc{rest[1] - '0', rest[3] - '0', player};
  pc.validate();
  if (revise && pc.horizon == 0) throw InvalidConfig("horizon 0 does not revise its goal");
  return pc;
}

namespace {

void check_one_goal(const Combination& goal, const Combination& state, const Combination& event) {
  if (goal.faces() != state.faces() || goal.faces() != event.faces())
    throw PreconditionError("face count mismatch between goal, state and event");
  if (!state.within(goal))
    throw PreconditionError("state '" + state.to_string() + "' is not within the goal '" + goal.to_string() + "'");
  if (event.norm() != goal.norm() - state.norm())
    throw PreconditionError("event '" + event.to_string() + "' does not recast the " +
                            std::to_string(goal.norm() - state.norm()) + " live dice");
}

}  // namespace

Combination ratchet_decision(const Combination& goal, const Combination& state, const Combination& event) {
  check_one_goal(goal, state, event);
  return meet(goal, state + event);
}

Combination bernoulli_decision(const Combination& goal, const Combination& state, const Combination& event) {
  check_one_goal(goal, state, event);
  Combination all = state + event;
  return all == goal ? all : state;
}

Combination dilemma_decision(const Combination& goal, const Combination& state, int remaining) {
  if (remaining < 1) throw PreconditionError("no dilemma without a remaining cast");
  if (!state.within(goal) || state == goal)
    throw PreconditionError("dilemma needs a state strictly within the goal");
  std::vector<Combination> candidates;
  const Combination missing = goal - state;
  for (int f = 1; f <= goal.faces(); ++f)
    if (missing.count(f) > 0) candidates.push_back(goal - Combination::unit(f, goal.faces()));
  return lagrangian_min(candidates);
}

namespace {

// Resolves a one-goal choice against the legal set: a completed goal that the
// imposed duration forbids becomes a dilemma, broken by `dilemma`.
DecisionRule with_dilemma(const Combination& goal, const RoundConfig& config,
                          std::function<Combination(const Combination&, const Combination&, const Combination&)> decide,
                          std::function<Combination(int, const Combination&)> dilemma) {
  if (goal.norm() != config.dice || goal.faces() != config.faces)
    throw PreconditionError("goal '" + goal.to_string() + "' is not a full combination of the round");
  return [=](int time, const Combination& state, const Combination& event, std::span<const Combination> legal) {
    Combination choice = decide(goal, state, event);
    if (std::find(legal.begin(), legal.end(), choice) != legal.end()) return choice;
    if (config.player == Player::next && choice == goal) return dilemma(time, state);
    throw RuleViolation("legal-successor", "one-goal decision '" + choice.to_string() + "' toward '" +
                                               goal.to_string() + "' breaks the round rules at time " +
                                               std::to_string(time));
  };
}

}  // namespace

DecisionRule one_goal_rule(const Combination& goal, const RoundConfig& config) {
  return with_dilemma(goal, config, ratchet_decision, [goal, config](int time, const Combination& state) {
    return dilemma_decision(goal, state, config.deadline() - time - 1);
  });
}

DecisionRule bernoulli_rule(const Combination& goal, const RoundConfig& config) {
  return with_dilemma(goal, config, bernoulli_decision, [goal, config](int time, const Combination& state) {
    return dilemma_decision(goal, state, config.deadline() - time - 1);
  });
}

DecisionRule scheduled_dilemma_rule(const Combination& goal, const RoundConfig& config, std::vector<int> schedule) {
  return with_dilemma(goal, config, ratchet_decision,
                      [goal, config, schedule](int time, const Combination& state) {
                        const Combination missing = goal - state;
                        if (time < static_cast<int>(schedule.size())) {
                          const int f = schedule[static_cast<std::size_t>(time)];
                          if (f >= 1 && f <= goal.faces() && missing.count(f) > 0)
                            return goal - Combination::unit(f, goal.faces());
                        }
                        return dilemma_decision(goal, state, config.deadline() - time - 1);
                      });
}

long pure_optimal_strategy_count(const Combination& goal, int casts) {
  if (casts < 1) throw PreconditionError("needs at least one cast");
  long n = 1;
  for (int k = 1; k < casts; ++k) n *= goal.distinct_faces();
  return n;
}

GoalReport evaluation_function(const Combination& state, int time, int serendipity, const UtilitySpec& utility,
                               const ResultProbabilityTable& table, std::optional<int> imposed) {
  if (serendipity == 1 && table.player() == Player::next)
    throw Unsupported("the serendipitous evaluation function cannot be used for next players");
  if (state.faces() != table.faces() || state.norm() > table.dice())
    throw PreconditionError("state '" + state.to_string() + "' does not fit the table's (D,F)");
  const int live = table.dice() - state.norm();
  const int deadline = imposed.value_or(table.casts());
  if (deadline > table.casts()) throw PreconditionError("imposed duration exceeds the table's J");
  const int remaining = deadline - time;

  GoalReport report;
  if (live == 0) {
    report.goals.push_back(Combination(state.faces()));
    report.targets.push_back(state);
    report.value = utility(time, state);
    return report;
  }
  if (remaining < 0) throw PreconditionError("time " + std::to_string(time) + " is past the round's deadline");

  std::optional<Extended> best;
  for (const auto& goal : combinations_of_norm(live, state.faces())) {
    Extended v(0L);
    if (serendipity == 0) {
      const auto diagonal = table.diagonal(remaining, goal);
      const Combination target = state + goal;
      for (int j = 0; j <= remaining; ++j)
        if (diagonal[static_cast<std::size_t>(j)] != 0)
          v = v + utility(time + j, target).scaled(diagonal[static_cast<std::size_t>(j)]);
    } else {
      for (const auto& o : table.outcomes(remaining, goal))
        v = v + utility(time + o.delay, state + o.result).scaled(o.probability);
    }
    if (!best || v > *best) {
      best = v;
      report.goals.assign(1, goal);
    } else if (v == *best) {
      report.goals.push_back(goal);
    }
  }
  report.value = *best;
  for (const auto& g : report.goals) report.targets.push_back(state + g);
  return report;
}

GoalIdentification::GoalIdentification(PolicyConfig policy, UtilitySpec utility,
                                       std::shared_ptr<const ResultProbabilityTable> table, RoundConfig round)
    : policy_(policy), utility_(std::move(utility)), table_(std::move(table)), round_(std::move(round)) {
  policy_.player = round_.player;
  policy_.validate();
  round_.validate();
  if (!table_) throw PreconditionError("goal identification needs a result probability table");
  table_->check_header(round_.player, round_.dice, round_.faces, round_.casts);
  if (policy_.horizon == 0) {
    GoalReport origin = report(0, Combination(round_.faces));
    fixed_goal_ = lagrangian_min(origin.goals);
  }
}

GoalReport GoalIdentification::report(int time, const Combination& state) const {
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find({time, state}); it != cache_.end()) return it->second;
  }
  GoalReport r = evaluation_function(state, time, policy_.serendipity, utility_, *table_, round_.deadline());
  std::lock_guard lock(mutex_);
  return cache_.emplace(std::make_pair(time, state), std::move(r)).first->second;
}

Combination GoalIdentification::decide(int time, const Combination& state, const Combination& event,
                                       std::span<const Combination> legal) const {
  if (legal.empty()) throw PreconditionError("no legal decision");
  if (legal.size() == 1) return legal.front();
  if (fixed_goal_) return one_goal_rule(*fixed_goal_, round_)(time, state, event, legal);

  std::optional<Extended> best;
  std::vector<Combination> argmax;
  for (const auto& t : legal) {
    Extended v = report(time + 1, t).value;
    if (!best || v > *best) {
      best = v;
      argmax.assign(1, t);
    } else if (v == *best) {
      argmax.push_back(t);
    }
  }
  return lagrangian_min(argmax);
}

DecisionRule GoalIdentification::rule() const {
  return [this](int time, const Combination& state, const Combination& event, std::span<const Combination> legal) {
    return decide(time, state, event, legal);
  };
}

Strategy goal_id_strategy(const PolicyConfig& policy, const UtilitySpec& utility,
                          std::shared_ptr<const ResultProbabilityTable> table, const FateGraph& graph) {
  GoalIdentification gi(policy, utility, std::move(table), graph.config());
  return tabulate(graph, gi.rule(), gi.policy().name());
}

}  // namespace fate421
