#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"
#include "fate421/round_rules.hpp"

#include <json.hpp>

#include <functional>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fate421 {

struct DecisionKey {
  int time = 0;
  Combination state;
  Combination event;

  friend bool operator==(const DecisionKey&, const DecisionKey&) = default;
  friend auto operator<=>(const DecisionKey&, const DecisionKey&) = default;
};

using MixedDecision = std::map<Combination, Rational>;
/// A successor state, or a law over successor states.
using Decision = std::variant<Combination, MixedDecision>;

/// Decision rule over (time, state, event).
class Strategy {
 public:
  explicit Strategy(std::string label = "strategy") : label_(std::move(label)) {}

  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return decisions_.size(); }
  const std::map<DecisionKey, Decision>& decisions() const noexcept { return decisions_; }

  /// Mixed weights must be positive and sum to 1; throws PreconditionError.
  void set(DecisionKey key, Decision decision);
  const Decision* find(const DecisionKey& key) const;

  /// Law of the successor; throws StrategyHole when there is no decision.
  std::vector<std::pair<Combination, Rational>> law(const DecisionKey& key) const;

  /// [{time, state, event, decision}], decision being a combination string
  /// or an object {state: "num/den"}.
  nlohmann::json to_json() const;
  static Strategy from_json(const nlohmann::json& j, int faces, std::string label = "file");

 private:
  std::string label_;
  std::map<DecisionKey, Decision> decisions_;
};

/// Pure decision rule: picks one of `legal` (never empty).
using DecisionRule = std::function<Combination(int time, const Combination& state, const Combination& event,
                                               std::span<const Combination> legal)>;

/// Tabulates `rule` on `graph`. Absorbing nodes get the identity decision and
/// single legal options are taken without calling the rule. With
/// `reachable_only`, only nodes the rule itself reaches from the origin are
/// visited. Throws RuleViolation if the rule returns an illegal successor.
Strategy tabulate(const FateGraph& graph, const DecisionRule& rule, std::string label, bool reachable_only = true);
/// Tabulates `rule` on the nodes it reaches from (time, state) only.
Strategy tabulate_from(const FateGraph& graph, const DecisionRule& rule, std::string label, int time,
                       const Combination& state);

/// Shortlex minimum of a nonempty candidate list.
const Combination& lagrangian_min(std::span<const Combination> candidates);

}  // namespace fate421
