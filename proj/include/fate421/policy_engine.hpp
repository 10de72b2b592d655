#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"
#include "fate421/round_rules.hpp"
#include "fate421/strategy.hpp"
#include "fate421/utility.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fate421 {

class ResultProbabilityTable;

/// Goal-identification parameters. Horizon 1 always revises (the policy must
/// run with a period of at most its horizon); horizon 0 never does.
struct PolicyConfig {
  int horizon = 0;
  int serendipity = 0;
  Player player = Player::first;

  bool revision() const noexcept { return horizon == 1; }
  /// Throws InvalidConfig or Unsupported.
  void validate() const;
  /// "goalid:h1s0"
  std::string name() const;
  /// Parses "goalid:h{0|1}s{0|1}[:rev]".
  static PolicyConfig parse(std::string_view text, Player player);
};

/// goal ∧ (state + event): keep every die that serves the goal.
Combination ratchet_decision(const Combination& goal, const Combination& state, const Combination& event);

/// Keep everything when the event completes the goal, else keep nothing new.
Combination bernoulli_decision(const Combination& goal, const Combination& state, const Combination& event);

/// A next player who would complete `goal` with `remaining` >= 1 casts still
/// imposed keeps the goal minus one of the dice not yet accumulated; the kept
/// combination is the shortlex-first candidate.
Combination dilemma_decision(const Combination& goal, const Combination& state, int remaining);

/// Ratchet toward `goal`, with dilemma_decision for next players.
DecisionRule one_goal_rule(const Combination& goal, const RoundConfig& config);
/// Bernoulli toward `goal`, with dilemma_decision for next players.
DecisionRule bernoulli_rule(const Combination& goal, const RoundConfig& config);

/// Replay-face schedules of a next player's one-goal strategy: at the dilemma
/// of time j the die of face schedule[j] is replayed when it is among the
/// candidates (shortlex fallback otherwise).
DecisionRule scheduled_dilemma_rule(const Combination& goal, const RoundConfig& config, std::vector<int> schedule);

/// Distinct faces of the goal to the power J - 1: the number of pure optimal
/// one-goal strategies of a next player with a non-brelan goal.
long pure_optimal_strategy_count(const Combination& goal, int casts);

struct GoalReport {
  /// Goals relative to the state: combinations of the live dice.
  std::vector<Combination> goals;
  /// state + goal, for each goal.
  std::vector<Combination> targets;
  Extended value;

  bool duplicity() const noexcept { return goals.size() > 1; }
};

/// Evaluation function at (time, state): the best goal for the live dice,
/// weighing utilities of the goal only (s = 0) or of every result (s = 1)
/// with the compiled one-goal result probabilities. Remaining duration is
/// J - time for the first player, J1 - time for next players (J1 defaults
/// to J). A full state returns its own utility.
GoalReport evaluation_function(const Combination& state, int time, int serendipity, const UtilitySpec& utility,
                               const ResultProbabilityTable& table, std::optional<int> imposed = std::nullopt);

/// Goal-identification policy bound to a round, a utility and a table.
/// Evaluations are cached per (time, state); safe to share across threads.
class GoalIdentification {
 public:
  GoalIdentification(PolicyConfig policy, UtilitySpec utility, std::shared_ptr<const ResultProbabilityTable> table,
                     RoundConfig round);

  const PolicyConfig& policy() const noexcept { return policy_; }
  const RoundConfig& round() const noexcept { return round_; }
  /// Goal chosen once at the origin by horizon 0.
  const std::optional<Combination>& fixed_goal() const noexcept { return fixed_goal_; }

  /// Evaluation function at (time, state), cached.
  GoalReport report(int time, const Combination& state) const;
  /// The decision for a cast; `legal` must be the legal successors.
  Combination decide(int time, const Combination& state, const Combination& event,
                     std::span<const Combination> legal) const;
  DecisionRule rule() const;

 private:
  PolicyConfig policy_;
  UtilitySpec utility_;
  std::shared_ptr<const ResultProbabilityTable> table_;
  RoundConfig round_;
  std::optional<Combination> fixed_goal_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, Combination>, GoalReport> cache_;
};

/// Tabulated goal-identification strategy on the round's fate graph.
Strategy goal_id_strategy(const PolicyConfig& policy, const UtilitySpec& utility,
                          std::shared_ptr<const ResultProbabilityTable> table, const FateGraph& graph);

}  // namespace fate421
