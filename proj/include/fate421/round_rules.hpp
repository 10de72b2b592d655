#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fate421 {

enum class Player { first, next };

std::string to_string(Player p);
/// "first" or "next"; throws InvalidConfig otherwise.
Player parse_player(std::string_view text);

/// Parameters of one round. `imposed` is the effective duration J1 the first
/// player imposed on a next player; it equals `casts` for a first player.
struct RoundConfig {
  int dice = 3;
  int faces = 6;
  int casts = 3;
  Player player = Player::first;
  int imposed = 3;

  static RoundConfig first(int dice, int faces, int casts);
  static RoundConfig next(int dice, int faces, int casts, int imposed);

  /// Time by which every die must be accumulated: J for the first player,
  /// J1 for next players.
  int deadline() const noexcept { return player == Player::first ? casts : imposed; }

  /// Throws InvalidConfig. D = 0 and J = 0 are accepted: they arise as
  /// renormalized sub-rounds. With J = 0 the origin is judged as it is.
  void validate() const;

  std::string describe() const;
  friend bool operator==(const RoundConfig&, const RoundConfig&) = default;
};

struct RoundState {
  int time = 0;
  Combination accumulated;

  int live(const RoundConfig& config) const { return config.dice - accumulated.norm(); }
  bool absorbing(const RoundConfig& config) const { return accumulated.norm() == config.dice; }
};

/// Successor states allowed after `event` is cast from `state` at `time`:
/// state + k for every k <= event, minus those the round's duration rules
/// exclude. Throws RuleViolation when the event has the wrong dice count or
/// the state is already absorbing.
std::vector<Combination> legal_decisions(const RoundConfig& config, int time, const Combination& state,
                                         const Combination& event);

/// Checks one concrete decision; throws RuleViolation naming the rule.
void check_decision(const RoundConfig& config, int time, const Combination& state, const Combination& event,
                    const Combination& successor);

/// Shifted problem seen from `state`: live dice, remaining casts, same role.
RoundConfig renormalize(const RoundState& state, const RoundConfig& config);

struct FateEvent {
  Combination cast;
  Rational probability;
  /// Indices into the next layer, in that layer's order.
  std::vector<int> successors;
};

struct FateNode {
  Combination state;
  bool absorbing = false;
  /// Empty on the last layer. An absorbing node has the single null event
  /// leading to itself.
  std::vector<FateEvent> events;
};

/// Merged fate graph: one node per (time, state) reachable under the rules,
/// layers 0..J, nodes of a layer in Eulerian order.
class FateGraph {
 public:
  explicit FateGraph(RoundConfig config);

  const RoundConfig& config() const noexcept { return config_; }
  int last_layer() const noexcept { return static_cast<int>(layers_.size()) - 1; }
  const std::vector<FateNode>& layer(int j) const { return layers_.at(static_cast<std::size_t>(j)); }
  const FateNode& node(int j, int index) const { return layer(j).at(static_cast<std::size_t>(index)); }
  std::optional<int> find(int j, const Combination& state) const;
  std::size_t node_count() const;

 private:
  friend FateGraph build_fate_graph(const RoundConfig& config);
  RoundConfig config_;
  std::vector<std::vector<FateNode>> layers_;
};

FateGraph build_fate_graph(const RoundConfig& config);

}  // namespace fate421
