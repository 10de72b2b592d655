#include "fate421/solver.hpp"

#include "fate421/detail/parallel.hpp"
#include "fate421/errors.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

namespace fate421 {

const Rational& SolvedGraph::root_value() const {
  const Extended& root = value.front().front();
  if (!root.finite()) throw Diagnostic("the optimal expected utility is -inf: no legal fate avoids excluded states");
  return root.value();
}

const Extended& SolvedGraph::value_at(int j, const Combination& state) const {
  auto index = graph->find(j, state);
  if (!index) throw PreconditionError("state '" + state.to_string() + "' is not in layer " + std::to_string(j));
  return value[static_cast<std::size_t>(j)][static_cast<std::size_t>(*index)];
}

std::size_t SolvedGraph::largest_optimal_set() const {
  std::size_t largest = 0;
  for (const auto& layer : optimal)
    for (const auto& node : layer)
      for (const auto& event : node) largest = std::max(largest, event.size());
  return largest;
}

SolvedGraph backward_induction(std::shared_ptr<const FateGraph> graph, const UtilitySpec& utility,
                               unsigned threads) {
  SolvedGraph solved{graph, utility, {}, {}};
  const int last = graph->last_layer();
  solved.value.resize(static_cast<std::size_t>(last) + 1);
  solved.optimal.resize(static_cast<std::size_t>(last) + 1);

  auto& judged = solved.value.back();
  for (const auto& node : graph->layer(last)) judged.push_back(utility(last, node.state));

  for (int j = last - 1; j >= 0; --j) {
    const auto& layer = graph->layer(j);
    const auto& ahead = solved.value[static_cast<std::size_t>(j) + 1];
    auto& values = solved.value[static_cast<std::size_t>(j)];
    auto& optimal = solved.optimal[static_cast<std::size_t>(j)];
    values.assign(layer.size(), Extended());
    optimal.assign(layer.size(), {});

    detail::parallel_for(layer.size(), threads, [&](std::size_t i) {
      const auto& node = layer[i];
      Extended total(0L);
      optimal[i].resize(node.events.size());
      for (std::size_t e = 0; e < node.events.size(); ++e) {
        const auto& event = node.events[e];
        const Extended* best = nullptr;
        auto& argmax = optimal[i][e];
        for (int s : event.successors) {
          const Extended& v = ahead[static_cast<std::size_t>(s)];
          if (!best || v > *best) {
            best = &v;
            argmax.assign(1, s);
          } else if (v == *best) {
            argmax.push_back(s);
          }
        }
        total = total + best->scaled(event.probability);
      }
      values[i] = std::move(total);
    });
  }
  return solved;
}

Strategy extract_pure_strategy(const SolvedGraph& solved, std::string label) {
  Strategy out(std::move(label));
  const auto& graph = *solved.graph;
  for (int j = 0; j < graph.last_layer(); ++j) {
    const auto& layer = graph.layer(j);
    for (std::size_t i = 0; i < layer.size(); ++i) {
      for (std::size_t e = 0; e < layer[i].events.size(); ++e) {
        std::vector<Combination> candidates;
        for (int s : solved.optimal[static_cast<std::size_t>(j)][i][e]) candidates.push_back(graph.node(j + 1, s).state);
        out.set({j, layer[i].state, layer[i].events[e].cast}, lagrangian_min(candidates));
      }
    }
  }
  return out;
}

Rational optimal_value(const RoundConfig& config, const UtilitySpec& utility) {
  auto graph = std::make_shared<const FateGraph>(build_fate_graph(config));
  return backward_induction(graph, utility).root_value();
}

namespace {

struct Exchanged {
  const FateGraph& graph;
  const UtilitySpec& utility;
  std::map<std::tuple<int, int, int>, Extended> memo;

  // Expected value of keeping successor `s` in layer j + 1: mean over the
  // next event of the best continuation.
  Extended after_decision(int j, int s) {
    const int t = j + 1;
    const auto& node = graph.node(t, s);
    if (t == graph.last_layer()) return utility(t, node.state);
    Extended total(0L);
    for (std::size_t e = 0; e < node.events.size(); ++e)
      total = total + after_event(t, s, static_cast<int>(e)).scaled(node.events[e].probability);
    return total;
  }

  // Best decision once event e has been cast from node i of layer j.
  Extended after_event(int j, int i, int e) {
    auto key = std::make_tuple(j, i, e);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto& event = graph.node(j, i).events[static_cast<std::size_t>(e)];
    std::optional<Extended> best;
    for (int s : event.successors) {
      Extended v = after_decision(j, s);
      if (!best || v > *best) best = std::move(v);
    }
    return memo.emplace(key, *best).first->second;
  }
};

}  // namespace

Rational exchanged_root_value(const FateGraph& graph, const UtilitySpec& utility) {
  const auto& origin = graph.node(0, 0);
  if (graph.last_layer() == 0) return utility(0, origin.state).value();
  Exchanged x{graph, utility, {}};
  Extended total(0L);
  for (std::size_t e = 0; e < origin.events.size(); ++e)
    total = total + x.after_event(0, 0, static_cast<int>(e)).scaled(origin.events[e].probability);
  if (!total.finite()) throw Diagnostic("the optimal expected utility is -inf");
  return total.value();
}

}  // namespace fate421
