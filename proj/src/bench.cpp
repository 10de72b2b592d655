#include "fate421/bench.hpp"

#include "fate421/errors.hpp"

#include <iomanip>
#include <sstream>

namespace fate421 {

const BenchRow& BenchTable::row(std::string_view policy) const {
  for (const auto& r : rows)
    if (r.policy == policy) return r;
  throw PreconditionError("no bench row '" + std::string(policy) + "'");
}

std::vector<std::pair<std::string, std::string>> bench_utilities(int dice, int faces) {
  if (dice == 3 && faces == 6)
    return {{"123 one-goal utility", "goal:123"},
            {"123, 224, 345 three-goal utility", "goals:123+224+345"},
            {"utility = transfer function", "transfer"},
            {"utility = sum of faces", "sumfaces"}};
  std::string goal;
  for (int i = 0; i < dice; ++i) goal += std::to_string(i % faces + 1) + (faces > 9 ? "," : "");
  if (faces > 9) goal = "[" + goal.substr(0, goal.size() - 1) + "]";
  return {{"one-goal utility", "goal:" + goal}, {"utility = sum of faces", "sumfaces"}};
}

std::vector<BenchTable> run_bench(Workbench& bench, int dice, int faces, int casts) {
  const RoundConfig first = RoundConfig::first(dice, faces, casts);
  const RoundConfig next = RoundConfig::next(dice, faces, casts, casts);
  std::vector<BenchTable> out;
  for (const auto& [title, text] : bench_utilities(dice, faces)) {
    const UtilitySpec utility = parse_utility(text, faces);
    BenchTable t;
    t.title = title;
    t.utility = text;
    t.optimum = bench.solve(first, utility)->root_value();
    if (t.optimum == 0) throw PreconditionError("zero optimum for '" + text + "'");
    auto ratio = [&](const PolicySpec& p, const RoundConfig& round) {
      return kolmogorov_expectation(bench.strategy(p, utility, round), utility, *bench.graph(round)) / t.optimum;
    };
    for (int h = 0; h <= 1; ++h)
      for (int s = 0; s <= 1; ++s) {
        const std::string name = "goalid:h" + std::to_string(h) + "s" + std::to_string(s);
        BenchRow row{name, ratio(PolicySpec::parse(name, first), first), std::nullopt};
        if (s == 0) row.next = ratio(PolicySpec::parse(name, next), next);
        t.rows.push_back(std::move(row));
      }
    t.rows.push_back({"max-moy", Rational(1), ratio(PolicySpec::parse("optimal", next), next)});
    out.push_back(std::move(t));
  }
  return out;
}

std::string format_bench(const std::vector<BenchTable>& tables, int digits) {
  std::ostringstream os;
  auto cell = [&](const std::optional<Rational>& q) { return q ? to_decimal(*q, digits) : std::string(); };
  for (const auto& t : tables) {
    os << t.title << "\n";
    os << "u0r = " << to_decimal(t.optimum, digits) << "  (" << to_string(t.optimum) << ")\n";
    os << std::left << std::setw(10) << "horizon" << std::setw(10) << "serendip." << std::setw(12) << "first"
       << "next\n";
    for (const auto& r : t.rows) {
      if (r.policy == "max-moy") {
        os << std::setw(20) << "max-moy";
      } else {
        os << std::setw(10) << r.policy.substr(8, 1) << std::setw(10) << r.policy.substr(10, 1);
      }
      os << std::setw(12) << cell(r.first) << cell(r.next) << "\n";
    }
    os << "exact\n";
    for (const auto& r : t.rows) {
      if (r.first) os << "  " << r.policy << " first " << to_string(*r.first) << "\n";
      if (r.next) os << "  " << r.policy << " next  " << to_string(*r.next) << "\n";
    }
    os << "\n";
  }
  return os.str();
}

nlohmann::json bench_json(const std::vector<BenchTable>& tables, int digits) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : t.rows)
      rows.push_back({{"policy", r.policy},
                      {"first", r.first ? value_json(*r.first, digits) : nlohmann::json()},
                      {"next", r.next ? value_json(*r.next, digits) : nlohmann::json()}});
    out.push_back({{"title", t.title}, {"utility", t.utility}, {"u0r", value_json(t.optimum, digits)}, {"rows", rows}});
  }
  return out;
}

}  // namespace fate421
