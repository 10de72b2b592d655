#include "fate421/round_rules.hpp"

#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace fate421 {

std::string to_string(Player p) { return p == Player::first ? "first" : "next"; }

Player parse_player(std::string_view text) {
  if (text == "first") return Player::first;
  if (text == "next") return Player::next;
  throw InvalidConfig("player must be 'first' or 'next', got '" + std::string(text) + "'");
}

RoundConfig RoundConfig::first(int dice, int faces, int casts) {
  RoundConfig c{dice, faces, casts, Player::first, casts};
  c.validate();
  return c;
}

RoundConfig RoundConfig::next(int dice, int faces, int casts, int imposed) {
  RoundConfig c{dice, faces, casts, Player::next, imposed};
  c.validate();
  return c;
}

void RoundConfig::validate() const {
  if (dice < 0) throw InvalidConfig("dice count must be >= 0");
  if (faces < 1) throw InvalidConfig("face count must be >= 1");
  if (casts < 0) throw InvalidConfig("cast count must be >= 0");
  if (player == Player::first && imposed != casts)
    throw InvalidConfig("an imposed duration applies to next players only");
  if (imposed < 0 || imposed > casts)
    throw InvalidConfig("imposed duration J1=" + std::to_string(imposed) + " outside 0..J=" + std::to_string(casts));
  if (dice > 0 && casts > 0 && deadline() == 0)
    throw InvalidConfig("a round with live dice needs at least one cast before its deadline");
}

std::string RoundConfig::describe() const {
  std::string out = "(D,F,J)=(" + std::to_string(dice) + "," + std::to_string(faces) + "," +
                    std::to_string(casts) + ") " + to_string(player);
  if (player == Player::next) out += " J1=" + std::to_string(imposed);
  return out;
}

namespace {

// Empty string when legal, else the violated rule.
std::string violated_rule(const RoundConfig& config, int time, const Combination& successor) {
  const bool full = successor.norm() == config.dice;
  if (config.player == Player::first) {
    if (time + 1 == config.casts && !full) return "last-cast: every die must be accumulated at the last cast";
  } else {
    if (time + 1 < config.imposed && full)
      return "imposed-duration: a next player may not accumulate every die before J1";
    if (time + 1 == config.imposed && !full) return "imposed-duration: every die must be accumulated at J1";
  }
  return {};
}

void check_cast(const RoundConfig& config, int time, const Combination& state, const Combination& event) {
  if (state.faces() != config.faces || event.faces() != config.faces)
    throw RuleViolation("face-count", "combination face count differs from F=" + std::to_string(config.faces));
  if (state.norm() == config.dice) throw RuleViolation("round-over", "the round is over: every die is accumulated");
  if (time >= config.deadline()) throw RuleViolation("round-over", "no cast left at time " + std::to_string(time));
  const int live = config.dice - state.norm();
  if (event.norm() != live)
    throw RuleViolation("recast-all-live-dice", "event '" + event.to_string() + "' has " +
                                                    std::to_string(event.norm()) + " dice, " +
                                                    std::to_string(live) + " are live");
}

}  // namespace

std::vector<Combination> legal_decisions(const RoundConfig& config, int time, const Combination& state,
                                         const Combination& event) {
  check_cast(config, time, state, event);
  std::vector<Combination> out;
  for (const auto& k : subcombinations(event)) {
    Combination t = state + k;
    if (violated_rule(config, time, t).empty()) out.push_back(std::move(t));
  }
  return out;
}

void check_decision(const RoundConfig& config, int time, const Combination& state, const Combination& event,
                    const Combination& successor) {
  check_cast(config, time, state, event);
  if (successor.faces() != config.faces)
    throw RuleViolation("face-count", "combination face count differs from F=" + std::to_string(config.faces));
  if (!state.within(successor) || !(successor - state).within(event))
    throw RuleViolation("keep-from-event", "'" + successor.to_string() + "' is not '" + state.to_string() +
                                               "' plus dice of the event '" + event.to_string() + "'");
  if (auto rule = violated_rule(config, time, successor); !rule.empty())
    throw RuleViolation(rule.substr(0, rule.find(':')), rule.substr(rule.find(':') + 2));
}

RoundConfig renormalize(const RoundState& state, const RoundConfig& config) {
  RoundConfig out = config;
  out.dice = config.dice - state.accumulated.norm();
  out.casts = std::max(0, config.casts - state.time);
  out.imposed = std::max(0, config.imposed - state.time);
  if (out.dice < 0) throw PreconditionError("state exceeds the dice count");
  return out;
}

FateGraph::FateGraph(RoundConfig config) : config_(std::move(config)) {}

std::optional<int> FateGraph::find(int j, const Combination& state) const {
  if (j < 0 || j > last_layer()) return std::nullopt;
  const auto& l = layer(j);
  auto it = std::lower_bound(l.begin(), l.end(), state,
                             [](const FateNode& n, const Combination& c) { return n.state < c; });
  if (it == l.end() || it->state != state) return std::nullopt;
  return static_cast<int>(it - l.begin());
}

std::size_t FateGraph::node_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

FateGraph build_fate_graph(const RoundConfig& config) {
  config.validate();
  FateGraph graph(config);
  auto& layers = graph.layers_;
  layers.resize(static_cast<std::size_t>(config.casts) + 1);

  FateNode origin;
  origin.state = Combination(config.faces);
  origin.absorbing = config.dice == 0;
  layers[0].push_back(std::move(origin));

  std::vector<std::vector<Cast>> casts(static_cast<std::size_t>(config.dice) + 1);
  for (int n = 0; n <= config.dice; ++n) casts[static_cast<std::size_t>(n)] = enumerate_casts(n, config.faces);

  for (int j = 0; j < config.casts; ++j) {
    auto& current = layers[static_cast<std::size_t>(j)];
    std::set<Combination> reached;
    std::vector<std::vector<std::vector<Combination>>> targets(current.size());

    for (std::size_t i = 0; i < current.size(); ++i) {
      auto& node = current[i];
      if (node.absorbing) {
        node.events.push_back({Combination(config.faces), Rational(1), {}});
        targets[i].push_back({node.state});
        continue;
      }
      const int live = config.dice - node.state.norm();
      for (const auto& cast : casts[static_cast<std::size_t>(live)]) {
        node.events.push_back({cast.combination, cast.probability, {}});
        targets[i].push_back(legal_decisions(config, j, node.state, cast.combination));
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i)
      for (const auto& per_event : targets[i])
        reached.insert(per_event.begin(), per_event.end());

    auto& next = layers[static_cast<std::size_t>(j) + 1];
    std::map<Combination, int> index;
    for (const auto& state : reached) {
      index.emplace(state, static_cast<int>(next.size()));
      FateNode n;
      n.state = state;
      n.absorbing = state.norm() == config.dice;
      next.push_back(std::move(n));
    }
    for (std::size_t i = 0; i < current.size(); ++i)
      for (std::size_t e = 0; e < targets[i].size(); ++e)
        for (const auto& t : targets[i][e]) current[i].events[e].successors.push_back(index.at(t));
  }
  return graph;
}

}  // namespace fate421
