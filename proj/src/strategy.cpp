#include "fate421/strategy.hpp"

#include "fate421/errors.hpp"

#include <algorithm>

namespace fate421 {

void Strategy::set(DecisionKey key, Decision decision) {
  if (auto* mixed = std::get_if<MixedDecision>(&decision)) {
    if (mixed->empty()) throw PreconditionError("mixed decision with empty support");
    Rational total = 0;
    for (const auto& [state, w] : *mixed) {
      if (w <= 0) throw PreconditionError("mixed decision weight must be positive");
      total += w;
    }
    if (total != 1) throw PreconditionError("mixed decision weights sum to " + to_string(total) + ", not 1");
  }
  decisions_.insert_or_assign(std::move(key), std::move(decision));
}

const Decision* Strategy::find(const DecisionKey& key) const {
  auto it = decisions_.find(key);
  return it == decisions_.end() ? nullptr : &it->second;
}

std::vector<std::pair<Combination, Rational>> Strategy::law(const DecisionKey& key) const {
  const Decision* d = find(key);
  if (!d)
    throw StrategyHole(label_ + " has no decision at time " + std::to_string(key.time) + ", state '" +
                       key.state.to_string() + "', event '" + key.event.to_string() + "'");
  if (const auto* pure = std::get_if<Combination>(d)) return {{*pure, Rational(1)}};
  const auto& mixed = std::get<MixedDecision>(*d);
  return {mixed.begin(), mixed.end()};
}

nlohmann::json Strategy::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [key, decision] : decisions_) {
    nlohmann::json rec{{"time", key.time}, {"state", key.state.to_string()}, {"event", key.event.to_string()}};
    if (const auto* pure = std::get_if<Combination>(&decision)) {
      rec["decision"] = pure->to_string();
    } else {
      nlohmann::json law = nlohmann::json::object();
      for (const auto& [state, w] : std::get<MixedDecision>(decision)) law[state.to_string()] = to_string(w);
      rec["decision"] = std::move(law);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

Strategy Strategy::from_json(const nlohmann::json& j, int faces, std::string label) {
  if (!j.is_array()) throw FormatError("strategy dump must be a JSON array");
  Strategy s(std::move(label));
  for (const auto& rec : j) {
    DecisionKey key{rec.at("time").get<int>(), Combination::parse(rec.at("state").get<std::string>(), faces),
                    Combination::parse(rec.at("event").get<std::string>(), faces)};
    const auto& d = rec.at("decision");
    if (d.is_string()) {
      s.set(std::move(key), Combination::parse(d.get<std::string>(), faces));
    } else {
      MixedDecision mixed;
      for (const auto& [state, w] : d.items()) mixed[Combination::parse(state, faces)] = parse_rational(w.get<std::string>());
      s.set(std::move(key), std::move(mixed));
    }
  }
  return s;
}

const Combination& lagrangian_min(std::span<const Combination> candidates) {
  if (candidates.empty()) throw PreconditionError("no candidate to break a tie between");
  return *std::min_element(candidates.begin(), candidates.end(), lagrangian_less);
}

namespace {

Strategy tabulate_layers(const FateGraph& graph, const DecisionRule& rule, std::string label, bool reachable_only,
                         int start, std::vector<char> reached) {
  Strategy out(std::move(label));
  for (int j = start; j < graph.last_layer(); ++j) {
    const auto& layer = graph.layer(j);
    std::vector<char> next(graph.layer(j + 1).size(), 0);
    for (std::size_t i = 0; i < layer.size(); ++i) {
      if (reachable_only && !reached[i]) continue;
      const auto& node = layer[i];
      for (const auto& event : node.events) {
        std::vector<Combination> legal;
        legal.reserve(event.successors.size());
        for (int s : event.successors) legal.push_back(graph.node(j + 1, s).state);

        Combination choice = legal.size() == 1 ? legal.front() : rule(j, node.state, event.cast, legal);
        auto it = std::find(legal.begin(), legal.end(), choice);
        if (it == legal.end())
          throw RuleViolation("legal-successor", out.label() + " chose '" + choice.to_string() + "' from '" +
                                                     node.state.to_string() + "' on event '" +
                                                     event.cast.to_string() + "' at time " + std::to_string(j));
        next[static_cast<std::size_t>(event.successors[static_cast<std::size_t>(it - legal.begin())])] = 1;
        out.set({j, node.state, event.cast}, std::move(choice));
      }
    }
    reached = std::move(next);
  }
  return out;
}

}  // namespace

Strategy tabulate(const FateGraph& graph, const DecisionRule& rule, std::string label, bool reachable_only) {
  return tabulate_layers(graph, rule, std::move(label), reachable_only, 0,
                         std::vector<char>(graph.layer(0).size(), 1));
}

Strategy tabulate_from(const FateGraph& graph, const DecisionRule& rule, std::string label, int time,
                       const Combination& state) {
  if (time < 0 || time > graph.last_layer())
    throw PreconditionError("time " + std::to_string(time) + " is outside the fate graph");
  auto index = graph.find(time, state);
  if (!index)
    throw PreconditionError("state '" + state.to_string() + "' is not reachable at time " + std::to_string(time));
  std::vector<char> reached(graph.layer(time).size(), 0);
  reached[static_cast<std::size_t>(*index)] = 1;
  return tabulate_layers(graph, rule, std::move(label), true, time, std::move(reached));
}

}  // namespace fate421
