#pragma once

#include "fate421/workbench.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fate421 {

/// {dice, faces, casts, player, imposed}; missing fields take (3, 6, 3, first)
/// and imposed = casts.
RoundConfig round_from_json(const nlohmann::json& j);
nlohmann::json round_to_json(const RoundConfig& config);

/// One round played by a human with a policy's advice. Every mutation goes
/// through legal_decisions; a session is serialized by its own mutex.
class AdviceSession {
 public:
  /// `utility` is a mini-language string or a utility JSON object.
  AdviceSession(std::string id, std::shared_ptr<Workbench> bench, RoundConfig round, std::string policy,
                nlohmann::json utility, int digits = 5);

  const std::string& id() const noexcept { return id_; }
  const RoundConfig& round() const noexcept { return round_; }

  /// Records a cast of the live dice. Throws RuleViolation.
  nlohmann::json cast(std::string_view event);
  /// Keeps `keep` out of the pending event. Throws RuleViolation.
  nlohmann::json keep(std::string_view keep);

  bool finished() const;
  std::optional<std::string> recommended_keep() const;
  nlohmann::json advice() const;
  /// {time, state, live, pending_event, finished, result}
  nlohmann::json state_json() const;
  /// Everything, history included.
  nlohmann::json to_json() const;
  /// Creation inputs and the moves played, enough to replay the session.
  nlohmann::json record() const;

 private:
  nlohmann::json state_locked() const;
  void refresh();

  std::string id_;
  std::shared_ptr<Workbench> bench_;
  RoundConfig round_;
  PolicySpec policy_;
  nlohmann::json utility_json_;
  UtilitySpec utility_;
  int digits_;
  std::shared_ptr<const FateGraph> graph_;
  DecisionRule rule_;
  std::shared_ptr<const GoalIdentification> goal_id_;

  int time_ = 0;
  Combination state_;
  std::optional<Combination> event_;
  std::optional<Combination> advised_;
  nlohmann::json advice_;
  nlohmann::json history_ = nlohmann::json::array();
  nlohmann::json moves_ = nlohmann::json::array();
  mutable std::mutex mutex_;
};

/// In-memory sessions, with optional snapshots to a JSON file.
class SessionStore {
 public:
  explicit SessionStore(std::shared_ptr<Workbench> bench, int digits = 5,
                        std::optional<std::filesystem::path> snapshot = std::nullopt);

  /// {config, policy, utility}
  std::shared_ptr<AdviceSession> create(const nlohmann::json& request);
  /// Throws NotFound.
  std::shared_ptr<AdviceSession> find(const std::string& id) const;
  bool erase(const std::string& id);
  std::size_t size() const;

  /// Writes the snapshot file, if any.
  void persist() const;

 private:
  void restore();

  std::shared_ptr<Workbench> bench_;
  int digits_;
  std::optional<std::filesystem::path> snapshot_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<AdviceSession>> sessions_;
  long next_id_ = 1;
};

/// Terminal advisor: prompts for each cast and keep on `in`, prints the goal
/// report, the recommended keep and the expected utility on `out`. "ok"
/// accepts the advice, "-" keeps nothing; empty or malformed input is asked
/// again. Returns the session at the end of the round (or of the input).
std::shared_ptr<AdviceSession> advise_terminal(std::shared_ptr<Workbench> bench, const RoundConfig& round,
                                               const std::string& policy, const nlohmann::json& utility,
                                               std::istream& in, std::ostream& out, int digits = 5);

}  // namespace fate421
