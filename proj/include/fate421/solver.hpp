#pragma once

#include "fate421/rational.hpp"
#include "fate421/round_rules.hpp"
#include "fate421/strategy.hpp"
#include "fate421/utility.hpp"

#include <memory>
#include <vector>

namespace fate421 {

/// Max-moy solution of a fate graph.
struct SolvedGraph {
  std::shared_ptr<const FateGraph> graph;
  UtilitySpec utility;
  /// value[j][node]
  std::vector<std::vector<Extended>> value;
  /// optimal[j][node][event]: indices of optimal successors in layer j + 1.
  std::vector<std::vector<std::vector<std::vector<int>>>> optimal;

  /// Throws Diagnostic if the optimum is -inf.
  const Rational& root_value() const;
  const Extended& value_at(int j, const Combination& state) const;
  /// Number of optimal successors per (node, event), for diagnostics.
  std::size_t largest_optimal_set() const;
};

/// Backward induction. Utilities are judged at layer J; layers are swept
/// from J - 1 down to 0, nodes of a layer on up to `threads` threads.
SolvedGraph backward_induction(std::shared_ptr<const FateGraph> graph, const UtilitySpec& utility,
                               unsigned threads = 1);

/// At each (node, event), the optimal successor first in shortlex order of
/// increasing Lagrangian lists. Absorbing nodes keep their state.
Strategy extract_pure_strategy(const SolvedGraph& solved, std::string label = "optimal");

Rational optimal_value(const RoundConfig& config, const UtilitySpec& utility);

/// Root value computed in the other alternation: the recursion on expected
/// values after each decision, maximum taken inside the mean over the next
/// event. Same result as backward_induction on every config.
Rational exchanged_root_value(const FateGraph& graph, const UtilitySpec& utility);

}  // namespace fate421
