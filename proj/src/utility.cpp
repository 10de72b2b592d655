#include "fate421/utility.hpp"

#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"

namespace fate421 {

UtilitySpec UtilitySpec::one_goal(Combination goal) {
  UtilitySpec u;
  u.kind_ = Kind::one_goal;
  u.goals_.push_back(std::move(goal));
  return u;
}

UtilitySpec UtilitySpec::multi_goal(std::vector<Combination> goals) {
  if (goals.empty()) throw InvalidConfig("multi-goal utility needs at least one goal");
  UtilitySpec u;
  u.kind_ = Kind::multi_goal;
  u.goals_ = std::move(goals);
  return u;
}

UtilitySpec UtilitySpec::transfer() {
  UtilitySpec u;
  u.kind_ = Kind::transfer;
  return u;
}

UtilitySpec UtilitySpec::sum_of_faces() {
  UtilitySpec u;
  u.kind_ = Kind::sum_of_faces;
  return u;
}

UtilitySpec UtilitySpec::table(std::map<std::pair<int, Combination>, Extended> values,
                               std::map<Combination, Extended> any_time) {
  UtilitySpec u;
  u.kind_ = Kind::table;
  u.values_ = std::make_shared<const std::map<std::pair<int, Combination>, Extended>>(std::move(values));
  u.any_time_ = std::make_shared<const std::map<Combination, Extended>>(std::move(any_time));
  return u;
}

bool UtilitySpec::stationary() const { return kind_ != Kind::table || values_->empty(); }

Extended UtilitySpec::operator()(int time, const Combination& state) const {
  const Combination d = base_ ? *base_ + state : state;
  const int t = time + time_offset_;
  switch (kind_) {
    case Kind::one_goal:
    case Kind::multi_goal: {
      long hits = 0;
      for (const auto& g : goals_)
        if (g == d) ++hits;
      return Extended(hits);
    }
    case Kind::transfer:
      return Extended(static_cast<long>(transfer_tokens(d)));
    case Kind::sum_of_faces:
      return Extended(static_cast<long>(d.face_sum()));
    case Kind::table: {
      if (auto it = values_->find({t, d}); it != values_->end()) return it->second;
      if (auto it = any_time_->find(d); it != any_time_->end()) return it->second;
      throw UtilityUndefined("utility table has no entry for state '" + d.to_string() + "' at time " +
                             std::to_string(t));
    }
  }
  throw UtilityUndefined("unknown utility kind");
}

UtilitySpec UtilitySpec::restricted(int time, const Combination& state) const {
  UtilitySpec u = *this;
  u.time_offset_ += time;
  u.base_ = base_ ? *base_ + state : state;
  return u;
}

std::string UtilitySpec::describe() const {
  std::string out;
  switch (kind_) {
    case Kind::one_goal:
      out = "goal:" + goals_.front().to_string();
      break;
    case Kind::multi_goal:
      out = "goals:";
      for (std::size_t i = 0; i < goals_.size(); ++i) out += (i ? "+" : "") + goals_[i].to_string();
      break;
    case Kind::transfer:
      out = "transfer";
      break;
    case Kind::sum_of_faces:
      out = "sumfaces";
      break;
    case Kind::table:
      out = "table(" + std::to_string(values_->size() + any_time_->size()) + " entries)";
      break;
  }
  if (base_ && !base_->empty()) out += " from " + base_->to_string();
  if (time_offset_) out += " at +" + std::to_string(time_offset_);
  return out;
}

namespace {

Combination combination_from_json(const nlohmann::json& j, int faces) {
  if (j.is_string()) return Combination::parse(j.get<std::string>(), faces);
  if (j.is_array()) {
    auto occupation = j.get<std::vector<int>>();
    if (static_cast<int>(occupation.size()) != faces)
      throw FormatError("Eulerian array length " + std::to_string(occupation.size()) + " differs from F=" +
                        std::to_string(faces));
    return Combination(std::move(occupation));
  }
  throw FormatError("combination must be a string or an occupation array");
}

}  // namespace

UtilitySpec UtilitySpec::from_json(const nlohmann::json& j, int faces) {
  if (!j.is_object() || !j.contains("kind")) throw FormatError("utility file needs a \"kind\" field");
  const auto kind = j.at("kind").get<std::string>();
  std::vector<Combination> goals;
  if (j.contains("goals"))
    for (const auto& g : j.at("goals")) goals.push_back(combination_from_json(g, faces));

  if (kind == "one-goal") {
    if (goals.size() != 1) throw FormatError("one-goal utility needs exactly one goal");
    return one_goal(goals.front());
  }
  if (kind == "multi-goal") return multi_goal(std::move(goals));
  if (kind == "transfer") return transfer();
  if (kind == "sum-of-faces") return sum_of_faces();
  if (kind != "table") throw FormatError("unknown utility kind '" + kind + "'");

  std::map<std::pair<int, Combination>, Extended> values;
  std::map<Combination, Extended> any_time;
  if (!j.contains("values") || !j.at("values").is_object()) throw FormatError("table utility needs \"values\"");
  for (const auto& [key, value] : j.at("values").items()) {
    auto colon = key.find(':');
    if (colon == std::string::npos) throw FormatError("value key must be \"time:state\", got '" + key + "'");
    const std::string time = key.substr(0, colon);
    Combination state = Combination::parse(key.substr(colon + 1), faces);
    Extended v = value.is_string() ? parse_extended(value.get<std::string>())
                                   : Extended(parse_rational(value.dump()));
    if (time == "*") {
      any_time[state] = v;
    } else {
      try {
        values[{std::stoi(time), state}] = v;
      } catch (const std::logic_error&) {
        throw FormatError("bad time in value key '" + key + "'");
      }
    }
  }
  return table(std::move(values), std::move(any_time));
}

nlohmann::json UtilitySpec::to_json() const {
  if (base_ || time_offset_) throw Unsupported("a restricted utility has no file form");
  nlohmann::json j;
  switch (kind_) {
    case Kind::one_goal:
      j["kind"] = "one-goal";
      break;
    case Kind::multi_goal:
      j["kind"] = "multi-goal";
      break;
    case Kind::transfer:
      j["kind"] = "transfer";
      return j;
    case Kind::sum_of_faces:
      j["kind"] = "sum-of-faces";
      return j;
    case Kind::table: {
      j["kind"] = "table";
      nlohmann::json values = nlohmann::json::object();
      for (const auto& [key, v] : *values_) values[std::to_string(key.first) + ":" + key.second.to_string()] = to_string(v);
      for (const auto& [state, v] : *any_time_) values["*:" + state.to_string()] = to_string(v);
      j["values"] = std::move(values);
      return j;
    }
  }
  j["goals"] = nlohmann::json::array();
  for (const auto& g : goals_) j["goals"].push_back(g.to_string());
  return j;
}

}  // namespace fate421
