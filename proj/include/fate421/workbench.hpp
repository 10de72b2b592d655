#pragma once

#include "fate421/evaluator.hpp"
#include "fate421/policy_engine.hpp"
#include "fate421/result_tables.hpp"
#include "fate421/round_rules.hpp"
#include "fate421/solver.hpp"
#include "fate421/strategy.hpp"
#include "fate421/utility.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>

namespace fate421 {

/// goal:421, goals:123+224+345, transfer, sumfaces, file:PATH (utility JSON).
UtilitySpec parse_utility(std::string_view text, int faces);

/// optimal, ratchet:GOAL, bernoulli:GOAL, goalid:h{0|1}s{0|1}[:rev].
struct PolicySpec {
  enum class Kind { optimal, ratchet, bernoulli, goal_id };

  Kind kind = Kind::optimal;
  std::optional<Combination> goal;
  PolicyConfig goal_id;
  std::string text = "optimal";

  static PolicySpec parse(std::string_view text, const RoundConfig& round);
};

/// {"decimal": ..., "exact": "num/den"}
nlohmann::json value_json(const Rational& q, int digits);
nlohmann::json value_json(const Extended& e, int digits);

/// Graphs, tables and solutions shared by the CLI, the benchmark and the
/// advice sessions. Cached entries are immutable; lookups are thread-safe.
class Workbench {
 public:
  explicit Workbench(unsigned threads = 1) : threads_(threads) {}

  unsigned threads() const noexcept { return threads_; }

  std::shared_ptr<const FateGraph> graph(const RoundConfig& config);
  std::shared_ptr<const ResultProbabilityTable> table(Player player, int dice, int faces, int casts);
  std::shared_ptr<const SolvedGraph> solve(const RoundConfig& config, const UtilitySpec& utility);

  /// Decision rule of the policy on the round; keeps what it uses alive.
  DecisionRule rule(const PolicySpec& policy, const UtilitySpec& utility, const RoundConfig& round);
  /// The goal-identification object behind a goalid policy.
  std::shared_ptr<const GoalIdentification> goal_identification(const PolicySpec& policy, const UtilitySpec& utility,
                                                                 const RoundConfig& round);
  Strategy strategy(const PolicySpec& policy, const UtilitySpec& utility, const RoundConfig& round);

 private:
  unsigned threads_;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int, Player, int>, std::shared_ptr<const FateGraph>> graphs_;
  std::map<std::tuple<Player, int, int, int>, std::shared_ptr<const ResultProbabilityTable>> tables_;
  std::map<std::pair<std::string, std::string>, std::shared_ptr<const SolvedGraph>> solutions_;
};

struct EvaluationReport {
  std::string policy;
  std::string utility;
  RoundConfig round;
  Rational value;
  /// First-player optimum of the same (D, F, J).
  Rational optimum;
  std::optional<Rational> ratio;
  DualityReport conservation;
  std::optional<MonteCarloResult> mc;

  nlohmann::json to_json(int digits) const;
};

/// Exact value, ratio to the first-player optimum, conservation check and,
/// with samples > 0, a Monte Carlo estimate.
EvaluationReport evaluate_policy(Workbench& bench, const PolicySpec& policy, const UtilitySpec& utility,
                                 const std::string& utility_text, const RoundConfig& round,
                                 std::uint64_t samples = 0, std::uint64_t seed = 421);

}  // namespace fate421
