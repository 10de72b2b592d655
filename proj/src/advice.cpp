#include "fate421/advice.hpp"

#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

namespace fate421 {

RoundConfig round_from_json(const nlohmann::json& j) {
  if (!j.is_null() && !j.is_object()) throw InvalidConfig("config must be an object");
  auto get = [&](const char* key, int fallback) {
    if (j.is_null() || !j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer()) throw InvalidConfig(std::string("config.") + key + " must be an integer");
    return j.at(key).get<int>();
  };
  const int dice = get("dice", 3);
  const int faces = get("faces", 6);
  const int casts = get("casts", 3);
  Player player = Player::first;
  if (!j.is_null() && j.contains("player")) {
    if (!j.at("player").is_string()) throw InvalidConfig("config.player must be a string");
    player = parse_player(j.at("player").get<std::string>());
  }
  RoundConfig round = player == Player::first ? RoundConfig::first(dice, faces, casts)
                                              : RoundConfig::next(dice, faces, casts, get("imposed", casts));
  if (player == Player::first && !j.is_null() && j.contains("imposed") && get("imposed", casts) != casts)
    throw InvalidConfig("a first player imposes the duration; config.imposed must equal casts");
  round.validate();
  return round;
}

nlohmann::json round_to_json(const RoundConfig& config) {
  return {{"dice", config.dice},
          {"faces", config.faces},
          {"casts", config.casts},
          {"player", to_string(config.player)},
          {"imposed", config.deadline()}};
}

namespace {

UtilitySpec utility_from(const nlohmann::json& utility, int faces) {
  if (utility.is_string()) return parse_utility(utility.get<std::string>(), faces);
  if (utility.is_object()) return UtilitySpec::from_json(utility, faces);
  throw InvalidConfig("utility must be a string or an object");
}

nlohmann::json combination_list(const std::vector<Combination>& cs) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : cs) out.push_back(c.to_string());
  return out;
}

}  // namespace

AdviceSession::AdviceSession(std::string id, std::shared_ptr<Workbench> bench, RoundConfig round, std::string policy,
                             nlohmann::json utility, int digits)
    : id_(std::move(id)),
      bench_(std::move(bench)),
      round_(std::move(round)),
      policy_(PolicySpec::parse(policy, round_)),
      utility_json_(std::move(utility)),
      utility_(utility_from(utility_json_, round_.faces)),
      digits_(digits),
      graph_(bench_->graph(round_)),
      state_(round_.faces) {
  if (policy_.kind == PolicySpec::Kind::goal_id) {
    goal_id_ = bench_->goal_identification(policy_, utility_, round_);
    auto gi = goal_id_;
    rule_ = [gi](int time, const Combination& state, const Combination& event, std::span<const Combination> legal) {
      return gi->decide(time, state, event, legal);
    };
  } else {
    rule_ = bench_->rule(policy_, utility_, round_);
  }
  history_.push_back({{"kind", "start"}, {"time", 0}, {"state", state_.to_string()}});
  refresh();
}

bool AdviceSession::finished() const {
  std::lock_guard lock(mutex_);
  return state_.norm() == round_.dice || time_ >= round_.deadline();
}

std::optional<std::string> AdviceSession::recommended_keep() const {
  std::lock_guard lock(mutex_);
  if (!advised_) return std::nullopt;
  return (*advised_ - state_).to_string();
}

nlohmann::json AdviceSession::advice() const {
  std::lock_guard lock(mutex_);
  return advice_;
}

nlohmann::json AdviceSession::cast(std::string_view text) {
  std::lock_guard lock(mutex_);
  if (event_) throw RuleViolation("decision-pending", "keep dice out of '" + event_->to_string() + "' first");
  Combination event = Combination::parse(text, round_.faces);
  legal_decisions(round_, time_, state_, event);
  event_ = event;
  history_.push_back({{"kind", "event"}, {"time", time_}, {"event", event.to_string()}});
  moves_.push_back({{"event", event.to_string()}});
  refresh();
  return {{"state", state_locked()}, {"advice", advice_}};
}

nlohmann::json AdviceSession::keep(std::string_view text) {
  std::lock_guard lock(mutex_);
  if (!event_) throw RuleViolation("cast-first", "no pending event: cast the live dice first");
  Combination kept = Combination::parse(text, round_.faces);
  if (!kept.within(*event_))
    throw RuleViolation("keep-from-event", "'" + kept.to_string() + "' is not part of the event '" +
                                               event_->to_string() + "'");
  const Combination successor = state_ + kept;
  check_decision(round_, time_, state_, *event_, successor);
  const bool advised = advised_ && *advised_ == successor;
  history_.push_back(
      {{"kind", "decision"}, {"time", time_}, {"keep", kept.to_string()}, {"state", successor.to_string()},
       {"advised", advised}});
  moves_.push_back({{"keep", kept.to_string()}});
  state_ = successor;
  ++time_;
  event_.reset();
  refresh();
  return {{"state", state_locked()}, {"advice", advice_}};
}

nlohmann::json AdviceSession::state_locked() const {
  nlohmann::json j;
  j["time"] = time_;
  j["state"] = state_.to_string();
  j["live"] = round_.dice - state_.norm();
  j["pending_event"] = event_ ? nlohmann::json(event_->to_string()) : nlohmann::json();
  const bool over = state_.norm() == round_.dice || time_ >= round_.deadline();
  j["finished"] = over;
  if (over) {
    nlohmann::json r;
    r["state"] = state_.to_string();
    r["duration"] = time_;
    try {
      r["rank"] = hierarchic_rank(state_);
      r["of"] = combinations_of_norm(state_.norm(), state_.faces()).size();
    } catch (const Error&) {
      r["rank"] = nullptr;
    }
    try {
      r["utility"] = value_json(utility_(graph_->last_layer(), state_), digits_);
    } catch (const Error&) {
      r["utility"] = nullptr;
    }
    j["result"] = r;
  }
  return j;
}

nlohmann::json AdviceSession::state_json() const {
  std::lock_guard lock(mutex_);
  return state_locked();
}

void AdviceSession::refresh() {
  nlohmann::json a;
  a["decision"] = nullptr;
  advised_.reset();
  int t = time_;
  Combination base = state_;
  std::vector<std::string> notes;
  if (event_) {
    try {
      const auto legal = legal_decisions(round_, time_, state_, *event_);
      Combination choice = legal.size() == 1 ? legal.front() : rule_(time_, state_, *event_, legal);
      check_decision(round_, time_, state_, *event_, choice);
      advised_ = choice;
      a["decision"] = {{"keep", (choice - state_).to_string()}, {"state", choice.to_string()}};
      t = time_ + 1;
      base = choice;
    } catch (const Error& e) {
      notes.emplace_back(e.what());
    }
  }

  nlohmann::json goals = {{"goals", nlohmann::json::array()},
                          {"targets", nlohmann::json::array()},
                          {"duplicity", false},
                          {"evaluation", nullptr}};
  try {
    if (goal_id_ && goal_id_->fixed_goal()) {
      const Combination& g = *goal_id_->fixed_goal();
      const GoalReport origin = goal_id_->report(0, Combination(round_.faces));
      if (base.within(g)) goals["goals"].push_back((g - base).to_string());
      goals["targets"].push_back(g.to_string());
      goals["duplicity"] = origin.duplicity();
      goals["evaluation"] = value_json(origin.value, digits_);
    } else if (goal_id_) {
      const GoalReport r = goal_id_->report(t, base);
      goals["goals"] = combination_list(r.goals);
      goals["targets"] = combination_list(r.targets);
      goals["duplicity"] = r.duplicity();
      goals["evaluation"] = value_json(r.value, digits_);
    } else if (policy_.goal) {
      if (base.within(*policy_.goal)) goals["goals"].push_back((*policy_.goal - base).to_string());
      goals["targets"].push_back(policy_.goal->to_string());
    }
  } catch (const Error& e) {
    notes.emplace_back(e.what());
  }
  a["goals"] = goals;

  a["expected_value"] = nullptr;
  a["result_probabilities"] = nullptr;
  if (!event_ || advised_) {
    try {
      const Strategy s = tabulate_from(*graph_, rule_, policy_.text, t, base);
      const auto law = result_law(s, *graph_, t, base);
      Rational v(0);
      std::vector<std::pair<Combination, Rational>> ranked(law.begin(), law.end());
      for (const auto& [d, m] : ranked) v += utility_(graph_->last_layer(), d).scaled(m).value();
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return lagrangian_less(x.first, y.first);
      });
      nlohmann::json probs = nlohmann::json::array();
      for (const auto& [d, m] : ranked) probs.push_back({{"result", d.to_string()}, {"probability", value_json(m, digits_)}});
      a["expected_value"] = value_json(v, digits_);
      a["result_probabilities"] = probs;
    } catch (const Error& e) {
      notes.emplace_back(e.what());
    }
  }
  if (!notes.empty()) a["note"] = notes.front();
  advice_ = std::move(a);
}

nlohmann::json AdviceSession::to_json() const {
  std::lock_guard lock(mutex_);
  return {{"id", id_},
          {"config", round_to_json(round_)},
          {"policy", policy_.text},
          {"utility", utility_json_},
          {"state", state_locked()},
          {"history", history_},
          {"advice", advice_}};
}

nlohmann::json AdviceSession::record() const {
  std::lock_guard lock(mutex_);
  return {{"id", id_},
          {"config", round_to_json(round_)},
          {"policy", policy_.text},
          {"utility", utility_json_},
          {"moves", moves_}};
}

SessionStore::SessionStore(std::shared_ptr<Workbench> bench, int digits, std::optional<std::filesystem::path> snapshot)
    : bench_(std::move(bench)), digits_(digits), snapshot_(std::move(snapshot)) {
  if (snapshot_ && std::filesystem::exists(*snapshot_)) restore();
}

std::shared_ptr<AdviceSession> SessionStore::create(const nlohmann::json& request) {
  if (!request.is_object()) throw InvalidConfig("session request must be an object");
  const RoundConfig round = round_from_json(request.value("config", nlohmann::json()));
  const auto policy = request.value("policy", nlohmann::json("optimal"));
  if (!policy.is_string()) throw InvalidConfig("policy must be a string");
  const auto utility = request.value("utility", nlohmann::json("goal:123"));
  std::string id;
  {
    std::lock_guard lock(mutex_);
    id = "s" + std::to_string(next_id_++);
  }
  auto session = std::make_shared<AdviceSession>(id, bench_, round, policy.get<std::string>(), utility, digits_);
  std::lock_guard lock(mutex_);
  sessions_.emplace(id, session);
  return session;
}

std::shared_ptr<AdviceSession> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("no session '" + id + "'");
  return it->second;
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard lock(mutex_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

void SessionStore::persist() const {
  if (!snapshot_) return;
  nlohmann::json j;
  {
    std::lock_guard lock(mutex_);
    j["next_id"] = next_id_;
    j["sessions"] = nlohmann::json::array();
    for (const auto& [id, s] : sessions_) j["sessions"].push_back(s->record());
  }
  const auto tmp = snapshot_->string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw InvalidConfig("cannot write snapshot '" + tmp + "'");
    out << j.dump(1) << "\n";
  }
  std::filesystem::rename(tmp, *snapshot_);
}

void SessionStore::restore() {
  std::ifstream in(*snapshot_);
  nlohmann::json j;
  try {
    in >> j;
    next_id_ = j.at("next_id").get<long>();
    for (const auto& r : j.at("sessions")) {
      auto s = std::make_shared<AdviceSession>(r.at("id").get<std::string>(), bench_, round_from_json(r.at("config")),
                                               r.at("policy").get<std::string>(), r.at("utility"), digits_);
      for (const auto& m : r.at("moves")) {
        if (m.contains("event")) s->cast(m.at("event").get<std::string>());
        else s->keep(m.at("keep").get<std::string>());
      }
      sessions_.emplace(s->id(), s);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("snapshot '" + snapshot_->string() + "': " + e.what());
  }
}

namespace {

std::string shown(const std::string& c) { return c.empty() ? "-" : c; }

void print_advice(std::ostream& out, const nlohmann::json& advice) {
  const auto& g = advice.at("goals");
  out << "goals";
  if (g.at("goals").empty()) out << " none";
  for (const auto& x : g.at("goals")) out << " " << shown(x.get<std::string>());
  out << " (targets";
  for (const auto& x : g.at("targets")) out << " " << x.get<std::string>();
  out << ")";
  if (g.at("duplicity").get<bool>()) out << " duplicity";
  if (!g.at("evaluation").is_null()) out << ", evaluation " << g.at("evaluation").at("decimal").get<std::string>();
  out << "\n";
  if (!advice.at("decision").is_null())
    out << "advice: keep " << shown(advice.at("decision").at("keep").get<std::string>()) << " -> state "
        << shown(advice.at("decision").at("state").get<std::string>()) << "\n";
  if (!advice.at("expected_value").is_null())
    out << "expected value " << advice.at("expected_value").at("decimal").get<std::string>() << " ("
        << advice.at("expected_value").at("exact").get<std::string>() << ")\n";
  if (advice.contains("note")) out << "note: " << advice.at("note").get<std::string>() << "\n";
}

bool read_line(std::istream& in, std::ostream& out, const std::string& prompt, std::string& line) {
  while (true) {
    out << prompt << std::flush;
    if (!std::getline(in, line)) {
      out << "\n";
      return false;
    }
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (!line.empty()) return true;
  }
}

}  // namespace

std::shared_ptr<AdviceSession> advise_terminal(std::shared_ptr<Workbench> bench, const RoundConfig& round,
                                               const std::string& policy, const nlohmann::json& utility,
                                               std::istream& in, std::ostream& out, int digits) {
  auto session = std::make_shared<AdviceSession>("terminal", std::move(bench), round, policy, utility, digits);
  out << "round " << round.describe() << ", policy " << policy << ", utility "
      << (utility.is_string() ? utility.get<std::string>() : utility.dump()) << "\n";
  print_advice(out, session->advice());
  std::string line;
  while (!session->finished()) {
    const auto st = session->state_json();
    const std::string prompt = "time " + std::to_string(st.at("time").get<int>()) + ", state " +
                               shown(st.at("state").get<std::string>()) + ", cast " +
                               std::to_string(st.at("live").get<int>()) + " dice> ";
    if (!read_line(in, out, prompt, line)) return session;
    try {
      session->cast(line);
    } catch (const RuleViolation& e) {
      out << "rejected (" << e.rule() << "): " << e.what() << "\n";
      continue;
    } catch (const Error& e) {
      out << "rejected: " << e.what() << "\n";
      continue;
    }
    print_advice(out, session->advice());
    while (true) {
      if (!read_line(in, out, "keep (ok = advice, - = none)> ", line)) return session;
      std::string keep = line;
      if (line == "ok") {
        auto advised = session->recommended_keep();
        if (!advised) {
          out << "no advice to accept\n";
          continue;
        }
        keep = *advised;
      }
      try {
        session->keep(keep);
        break;
      } catch (const RuleViolation& e) {
        out << "rejected (" << e.rule() << "): " << e.what() << "\n";
      } catch (const Error& e) {
        out << "rejected: " << e.what() << "\n";
      }
    }
    if (!session->finished()) print_advice(out, session->advice());
  }
  const auto result = session->state_json().at("result");
  out << "round over: result " << shown(result.at("state").get<std::string>()) << ", J1 = "
      << result.at("duration").get<int>();
  if (!result.at("rank").is_null())
    out << ", hierarchic rank " << result.at("rank").get<int>() << " of " << result.at("of").get<int>();
  if (!result.at("utility").is_null()) out << ", utility " << result.at("utility").at("decimal").get<std::string>();
  out << "\n";
  return session;
}

}  // namespace fate421
