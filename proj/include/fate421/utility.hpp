#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fate421 {

/// Utility as a function of time and state, valued in the rationals
/// extended with -inf.
class UtilitySpec {
 public:
  enum class Kind { one_goal, multi_goal, transfer, sum_of_faces, table };

  static UtilitySpec one_goal(Combination goal);
  /// Count-weighted: a goal listed twice scores 2.
  static UtilitySpec multi_goal(std::vector<Combination> goals);
  static UtilitySpec transfer();
  static UtilitySpec sum_of_faces();
  /// Explicit values keyed by (time, state); `any_time` entries apply at every
  /// time that has no explicit entry.
  static UtilitySpec table(std::map<std::pair<int, Combination>, Extended> values,
                           std::map<Combination, Extended> any_time = {});

  /// {"kind": ..., "goals": [...], "values": {"time:state": "num/den"}};
  /// "*:state" keys are time-independent.
  static UtilitySpec from_json(const nlohmann::json& j, int faces);
  nlohmann::json to_json() const;

  Kind kind() const noexcept { return kind_; }
  bool stationary() const;
  const std::vector<Combination>& goals() const noexcept { return goals_; }

  /// Throws UtilityUndefined for a table without an entry.
  Extended operator()(int time, const Combination& state) const;

  /// The utility of the sub-round started from `state` at `time`:
  /// u'(t, d) = u(time + t, state + d).
  UtilitySpec restricted(int time, const Combination& state) const;

  std::string describe() const;

 private:
  Kind kind_ = Kind::sum_of_faces;
  std::vector<Combination> goals_;
  std::shared_ptr<const std::map<std::pair<int, Combination>, Extended>> values_;
  std::shared_ptr<const std::map<Combination, Extended>> any_time_;
  int time_offset_ = 0;
  std::optional<Combination> base_;
};

}  // namespace fate421
