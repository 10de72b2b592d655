#include "fate421/result_tables.hpp"

#include "fate421/detail/parallel.hpp"
#include "fate421/dice_model.hpp"
#include "fate421/errors.hpp"
#include "fate421/evaluator.hpp"
#include "fate421/policy_engine.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace fate421 {

ResultProbabilityTable::ResultProbabilityTable(Player player, int dice, int faces, int casts, bool diagnostic)
    : player_(player), dice_(dice), faces_(faces), casts_(casts), diagnostic_(diagnostic) {}

namespace {

struct Task {
  int norm;
  int imposed;
  Combination goal;
};

bool dilemma_free(Player player, int imposed, const Combination& goal, const Combination& result) {
  return player == Player::first || imposed <= 1 || goal.norm() <= 1 || goal == result || goal.is_brelan();
}

bool is_representative(const Combination& goal, const Combination& result) {
  auto cls = canonical_couple(goal, result);
  return cls.goal == goal && cls.result == result;
}

std::map<CellKey, Cell> compile_task(Player player, int faces, const Task& task, bool diagnostic) {
  std::map<CellKey, Cell> out;
  const auto results = combinations_of_norm(task.norm, faces);
  const std::size_t width = static_cast<std::size_t>(task.imposed) + 1;

  if (task.norm == 0 || task.imposed == 0) {
    for (const auto& d : results) {
      if (!is_representative(task.goal, d)) continue;
      Cell cell{true, std::vector<Rational>(width, Rational(0))};
      if (d == task.goal) cell.by_delay[0] = 1;
      out.emplace(CellKey{task.imposed, task.goal, d}, std::move(cell));
    }
    return out;
  }

  const RoundConfig config = player == Player::first
                                 ? RoundConfig::first(task.norm, faces, task.imposed)
                                 : RoundConfig::next(task.norm, faces, task.imposed, task.imposed);
  const FateGraph graph = build_fate_graph(config);
  const Strategy ratchet = tabulate(graph, one_goal_rule(task.goal, config), "one-goal " + task.goal.to_string());
  const auto density = fokker_planck_density<Rational>(ratchet, graph);

  for (const auto& d : results) {
    if (!is_representative(task.goal, d)) continue;
    Cell cell{dilemma_free(player, task.imposed, task.goal, d), {}};
    if (cell.defined || diagnostic) {
      cell.by_delay.assign(width, Rational(0));
      cell.by_delay[0] = density.at(0, d);
      for (int j = 1; j <= task.imposed; ++j)
        cell.by_delay[static_cast<std::size_t>(j)] = density.at(j, d) - density.at(j - 1, d);
    }
    out.emplace(CellKey{task.imposed, task.goal, d}, std::move(cell));
  }
  return out;
}

}  // namespace

ResultProbabilityTable ResultProbabilityTable::compile(Player player, int dice, int faces, int casts,
                                                       bool diagnostic, unsigned threads) {
  if (dice < 0 || faces < 1 || casts < 0) throw InvalidConfig("table needs D >= 0, F >= 1, J >= 0");
  if (player == Player::first && dice > faces)
    throw Unsupported("first-player tables rest on the ratchet, optimal only for D <= F");
  ResultProbabilityTable table(player, dice, faces, casts, diagnostic);

  std::vector<Task> tasks;
  for (int n = 0; n <= dice; ++n) {
    std::set<Combination> goals;
    for (const auto& c : combinations_of_norm(n, faces)) goals.insert(canonical_class(c));
    for (int imposed = 0; imposed <= casts; ++imposed)
      for (const auto& g : goals) tasks.push_back({n, imposed, g});
  }
  std::vector<std::map<CellKey, Cell>> parts(tasks.size());
  detail::parallel_for(tasks.size(), threads,
                       [&](std::size_t i) { parts[i] = compile_task(player, faces, tasks[i], diagnostic); });
  for (auto& part : parts) table.cells_.merge(part);
  return table;
}

void ResultProbabilityTable::check_header(Player player, int dice, int faces, int casts) const {
  if (player != player_ || dice != dice_ || faces != faces_ || casts != casts_)
    throw TableMismatch("table is for " + to_string(player_) + " (D,F,J)=(" + std::to_string(dice_) + "," +
                        std::to_string(faces_) + "," + std::to_string(casts_) + "), requested " +
                        to_string(player) + " (" + std::to_string(dice) + "," + std::to_string(faces) + "," +
                        std::to_string(casts) + ")");
}

void ResultProbabilityTable::check_query(int imposed, const Combination& goal, const Combination& result) const {
  if (goal.faces() != faces_ || result.faces() != faces_) throw TableMismatch("combination face count differs from the table's F");
  if (goal.norm() != result.norm()) throw PreconditionError("goal and result norms differ");
  if (goal.norm() > dice_) throw PreconditionError("goal exceeds the table's dice count");
  if (imposed < 0 || imposed > casts_)
    throw PreconditionError("duration " + std::to_string(imposed) + " outside 0.." + std::to_string(casts_));
}

const Cell& ResultProbabilityTable::cell(int imposed, const Combination& goal, const Combination& result) const {
  check_query(imposed, goal, result);
  auto cls = canonical_couple(goal, result);
  auto it = cells_.find({imposed, cls.goal, cls.result});
  if (it == cells_.end())
    throw TableMismatch("table lacks the class of (" + goal.to_string() + ", " + result.to_string() + ")");
  return it->second;
}

bool ResultProbabilityTable::defined(int imposed, const Combination& goal, const Combination& result) const {
  return cell(imposed, goal, result).defined;
}

Rational ResultProbabilityTable::query(int imposed, const Combination& goal, int delay, const Combination& result) const {
  const Cell& c = cell(imposed, goal, result);
  if (delay < 0 || delay > imposed) throw PreconditionError("delay outside 0..J1");
  if (c.by_delay.empty())
    throw UndefinedCell("p_2(" + std::to_string(imposed) + ", " + goal.to_string() + ", " + std::to_string(delay) +
                        ", " + result.to_string() + ") depends on how dilemmas are broken and is undefined");
  return c.by_delay[static_cast<std::size_t>(delay)];
}

std::vector<Rational> ResultProbabilityTable::diagonal(int imposed, const Combination& goal) const {
  return cell(imposed, goal, goal).by_delay;
}

const std::vector<Outcome>& ResultProbabilityTable::outcomes(int imposed, const Combination& goal) const {
  {
    std::lock_guard lock(expansions_->mutex);
    if (auto it = expansions_->outcomes.find({imposed, goal}); it != expansions_->outcomes.end()) return it->second;
  }
  std::vector<Outcome> out;
  for (const auto& d : combinations_of_norm(goal.norm(), faces_)) {
    const Cell& c = cell(imposed, goal, d);
    if (c.by_delay.empty())
      throw UndefinedCell("results of goal " + goal.to_string() + " depend on how dilemmas are broken");
    for (int j = 0; j <= imposed; ++j)
      if (c.by_delay[static_cast<std::size_t>(j)] != 0) out.push_back({j, d, c.by_delay[static_cast<std::size_t>(j)]});
  }
  std::lock_guard lock(expansions_->mutex);
  return expansions_->outcomes.emplace(std::make_pair(imposed, goal), std::move(out)).first->second;
}

namespace {

nlohmann::json occupation_json(const Combination& c) { return c.occupation(); }

Combination combination_json(const nlohmann::json& j, int faces) {
  if (j.is_string()) return Combination::parse(j.get<std::string>(), faces);
  auto occupation = j.get<std::vector<int>>();
  if (static_cast<int>(occupation.size()) != faces) throw FormatError("Eulerian array length differs from F");
  return Combination(std::move(occupation));
}

}  // namespace

nlohmann::json ResultProbabilityTable::to_json() const {
  nlohmann::json header{{"player", to_string(player_)}, {"D", dice_},        {"F", faces_},
                        {"J", casts_},                  {"version", format_version}, {"diagnostic", diagnostic_}};
  std::map<std::pair<Combination, Combination>, nlohmann::json> grouped;
  for (const auto& [key, cell] : cells_) {
    auto& rec = grouped[{key.goal, key.result}];
    if (rec.is_null()) {
      rec = {{"goal", occupation_json(key.goal)},
             {"result", occupation_json(key.result)},
             {"entries", nlohmann::json::object()},
             {"undefined", nlohmann::json::array()}};
    }
    if (!cell.defined) rec["undefined"].push_back(key.imposed);
    for (std::size_t j = 0; j < cell.by_delay.size(); ++j)
      rec["entries"][std::to_string(key.imposed) + "," + std::to_string(j)] = to_string(cell.by_delay[j]);
  }
  nlohmann::json classes = nlohmann::json::array();
  for (auto& [key, rec] : grouped) classes.push_back(std::move(rec));
  return {{"header", std::move(header)}, {"classes", std::move(classes)}};
}

ResultProbabilityTable ResultProbabilityTable::from_json(const nlohmann::json& j) {
  try {
    const auto& h = j.at("header");
    if (h.at("version").get<int>() != format_version)
      throw FormatError("table format version " + std::to_string(h.at("version").get<int>()) + ", expected " +
                        std::to_string(format_version));
    ResultProbabilityTable table(parse_player(h.at("player").get<std::string>()), h.at("D").get<int>(),
                                 h.at("F").get<int>(), h.at("J").get<int>(), h.value("diagnostic", false));
    for (const auto& rec : j.at("classes")) {
      const Combination goal = combination_json(rec.at("goal"), table.faces_);
      const Combination result = combination_json(rec.at("result"), table.faces_);
      std::set<int> undefined;
      if (rec.contains("undefined")) undefined = rec.at("undefined").get<std::set<int>>();
      std::map<int, std::map<int, Rational>> rows;
      for (const auto& [key, value] : rec.at("entries").items()) {
        auto comma = key.find(',');
        if (comma == std::string::npos) throw FormatError("entry key must read \"J1,j\", got '" + key + "'");
        rows[std::stoi(key.substr(0, comma))][std::stoi(key.substr(comma + 1))] = parse_rational(value.get<std::string>());
      }
      std::set<int> durations = undefined;
      for (const auto& [imposed, row] : rows) durations.insert(imposed);
      for (int imposed : durations) {
        Cell cell{!undefined.contains(imposed), {}};
        if (auto it = rows.find(imposed); it != rows.end()) {
          cell.by_delay.assign(static_cast<std::size_t>(imposed) + 1, Rational(0));
          for (const auto& [delay, p] : it->second) {
            if (delay < 0 || delay > imposed) throw FormatError("delay outside 0..J1 in table file");
            cell.by_delay[static_cast<std::size_t>(delay)] = p;
          }
        }
        table.cells_.emplace(CellKey{imposed, goal, result}, std::move(cell));
      }
    }
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("corrupt table file: ") + e.what());
  } catch (const std::logic_error& e) {
    throw FormatError(std::string("corrupt table file: ") + e.what());
  }
}

void ResultProbabilityTable::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path.string());
  out << to_json().dump(1) << '\n';
}

ResultProbabilityTable ResultProbabilityTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("corrupt table file " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

std::string ResultProbabilityTable::chart_csv(int digits) const {
  std::ostringstream out;
  out << "imposed,goal,result,delay,exact,decimal\n";
  std::vector<const std::pair<const CellKey, Cell>*> rows;
  for (const auto& entry : cells_) rows.push_back(&entry);
  std::stable_sort(rows.begin(), rows.end(), [](auto* a, auto* b) {
    if (a->first.goal.norm() != b->first.goal.norm()) return a->first.goal.norm() > b->first.goal.norm();
    if (a->first.goal != b->first.goal) return lagrangian_less(a->first.goal, b->first.goal);
    if (a->first.imposed != b->first.imposed) return a->first.imposed > b->first.imposed;
    return lagrangian_less(a->first.result, b->first.result);
  });
  for (const auto* entry : rows) {
    const auto& [key, cell] = *entry;
    for (int j = 0; j <= key.imposed; ++j) {
      out << key.imposed << ',' << key.goal.to_string() << ',' << key.result.to_string() << ',' << j << ',';
      if (cell.by_delay.empty()) {
        out << "undefined,undefined\n";
      } else {
        const Rational& p = cell.by_delay[static_cast<std::size_t>(j)];
        out << to_string(p) << ',' << to_decimal(p, digits) << '\n';
      }
    }
  }
  return out.str();
}

Rational cumulative_diagonal(const ResultProbabilityTable& table, int imposed, const Combination& d) {
  const auto row = table.diagonal(imposed, d);
  Rational s = 0;
  for (std::size_t j = 1; j < row.size(); ++j) s += row[j];
  return s;
}

bool PropertyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return c.passed; });
}

namespace {

struct Checker {
  PropertyCheck check;
  int failures = 0;

  explicit Checker(std::string name) { check.name = std::move(name); }
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    check.passed = false;
    if (++failures <= 3) check.detail += (check.detail.empty() ? "" : "; ") + what;
  }
  PropertyCheck done() {
    if (failures > 3) check.detail += "; " + std::to_string(failures - 3) + " more";
    if (check.passed && check.detail.empty()) check.detail = "ok";
    return check;
  }
};

std::string cell_name(const char* p, int imposed, const Combination& g, int j, const Combination& d) {
  return std::string(p) + "(" + std::to_string(imposed) + "," + g.to_string() + "," + std::to_string(j) + "," +
         d.to_string() + ")";
}

}  // namespace

PropertyReport verify_properties(const ResultProbabilityTable& table, const ResultProbabilityTable* companion) {
  PropertyReport report;
  const int D = table.dice(), F = table.faces(), J = table.casts();
  const bool first = table.player() == Player::first;
  const char* p = first ? "p_1" : "p_2";

  {
    Checker c("p_i(0,g,0,d) = [g = d]");
    for (int n = 0; n <= D; ++n)
      for (const auto& g : combinations_of_norm(n, F))
        for (const auto& d : combinations_of_norm(n, F))
          c.expect(table.query(0, g, 0, d) == (g == d ? 1 : 0), cell_name(p, 0, g, 0, d));
    report.checks.push_back(c.done());
  }
  {
    Checker c("p_i(J,0,j,0) = [j = 0]");
    const Combination zero(F);
    for (int imposed = 0; imposed <= J; ++imposed)
      for (int j = 0; j <= imposed; ++j)
        c.expect(table.query(imposed, zero, j, zero) == (j == 0 ? 1 : 0), cell_name(p, imposed, zero, j, zero));
    report.checks.push_back(c.done());
  }
  if (J >= 1) {
    Checker c("p_i(1,g,1,d) = p(d)");
    for (int n = 1; n <= D; ++n)
      for (const auto& g : combinations_of_norm(n, F))
        for (const auto& d : combinations_of_norm(n, F))
          c.expect(table.query(1, g, 1, d) == cast_probability(d), cell_name(p, 1, g, 1, d));
    report.checks.push_back(c.done());
  }
  {
    Checker c("p_i(J,g,j,d) = 0 for j < J, g != d");
    for (const auto& [key, cell] : table.cells())
      if (key.goal != key.result && !cell.by_delay.empty())
        for (int j = 0; j < key.imposed; ++j)
          c.expect(cell.by_delay[static_cast<std::size_t>(j)] == 0, cell_name(p, key.imposed, key.goal, j, key.result));
    report.checks.push_back(c.done());
  }
  if (first) {
    // At delay 0 only the empty combination is a result, so nonempty d start at 1.
    Checker c("p_1(J,d,j,d) = p_1(j,d,j,d) for j < J");
    for (int n = 0; n <= D; ++n)
      for (const auto& d : combinations_of_norm(n, F))
        for (int imposed = 0; imposed <= J; ++imposed)
          for (int j = n > 0 ? 1 : 0; j < imposed; ++j)
            c.expect(table.query(imposed, d, j, d) == table.query(j, d, j, d), cell_name(p, imposed, d, j, d));
    report.checks.push_back(c.done());
  } else {
    Checker c("p_2(J,g,j,d) = 0 for j < J");
    for (const auto& [key, cell] : table.cells())
      if (key.goal.norm() > 0 && !cell.by_delay.empty())
        for (int j = 0; j < key.imposed; ++j)
          c.expect(cell.by_delay[static_cast<std::size_t>(j)] == 0, cell_name(p, key.imposed, key.goal, j, key.result));
    report.checks.push_back(c.done());
  }
  if (first) {
    Checker c("sum over d and j of p_1(J,g,j,d) = 1");
    for (int n = 0; n <= D; ++n)
      for (const auto& g : combinations_of_norm(n, F))
        for (int imposed = 0; imposed <= J; ++imposed) {
          Rational s = 0;
          for (const auto& d : combinations_of_norm(n, F))
            for (int j = 0; j <= imposed; ++j) s += table.query(imposed, g, j, d);
          c.expect(s == 1, "goal " + g.to_string() + " J1=" + std::to_string(imposed) + " sums to " + to_string(s));
        }
    report.checks.push_back(c.done());
  } else {
    Checker c("sum over d of p_2(j,brelan,j,d) = 1");
    for (int n = 1; n <= D; ++n)
      for (int f = 1; f <= F; ++f) {
        std::vector<int> occupation(static_cast<std::size_t>(F), 0);
        occupation[static_cast<std::size_t>(f - 1)] = n;
        const Combination g(occupation);
        for (int imposed = 0; imposed <= J; ++imposed) {
          Rational s = 0;
          for (const auto& d : combinations_of_norm(n, F)) s += table.query(imposed, g, imposed, d);
          c.expect(s == 1, "goal " + g.to_string() + " J1=" + std::to_string(imposed) + " sums to " + to_string(s));
        }
      }
    report.checks.push_back(c.done());
  }
  if (D >= 1) {
    Checker c("couple classes of full combinations");
    const auto classes = enumerate_couple_classes(D, F);
    std::size_t stored = 0, diagonal_stored = 0, diagonal = 0;
    for (const auto& cls : classes) diagonal += cls.goal == cls.result;
    for (const auto& [key, cell] : table.cells())
      if (key.imposed == J && key.goal.norm() == D) {
        ++stored;
        diagonal_stored += key.goal == key.result;
      }
    c.check.detail = std::to_string(classes.size()) + " classes, " + std::to_string(diagonal) + " diagonal";
    c.expect(stored == classes.size(), std::to_string(stored) + " stored vs " + std::to_string(classes.size()));
    c.expect(diagonal_stored == diagonal, std::to_string(diagonal_stored) + " diagonal stored vs " + std::to_string(diagonal));
    if (D == 3 && F == 6) {
      c.expect(classes.size() == 31, std::to_string(classes.size()) + " classes, 31 expected");
      c.expect(diagonal == 3, std::to_string(diagonal) + " diagonal classes, 3 expected");
    }
    report.checks.push_back(c.done());
  }
  {
    Checker c("next-player cells defined exactly on the diagonal and brelan goals");
    for (const auto& [key, cell] : table.cells()) {
      const bool expected = dilemma_free(table.player(), key.imposed, key.goal, key.result);
      c.expect(cell.defined == expected, cell_name(p, key.imposed, key.goal, 0, key.result));
    }
    report.checks.push_back(c.done());
  }
  if (companion && companion->player() != table.player()) {
    const auto& t1 = first ? table : *companion;
    const auto& t2 = first ? *companion : table;
    Checker c("s_1(J,d) > s_2(J,d) = p_2(J,d,J,d) > p_1(J,d,J,d) for J > 1");
    if (t1.dice() != t2.dice() || t1.faces() != t2.faces()) {
      c.expect(false, "tables of different (D,F)");
    } else {
      for (const auto& d : combinations_of_norm(D, F))
        for (int imposed = 2; imposed <= std::min(t1.casts(), t2.casts()); ++imposed) {
          const Rational s1 = cumulative_diagonal(t1, imposed, d), s2 = cumulative_diagonal(t2, imposed, d);
          const Rational p2 = t2.query(imposed, d, imposed, d), p1 = t1.query(imposed, d, imposed, d);
          c.expect(s1 > s2 && s2 == p2 && p2 > p1, "d=" + d.to_string() + " J=" + std::to_string(imposed));
        }
    }
    report.checks.push_back(c.done());
  }
  return report;
}

std::vector<Rational> galton_watson_law(int dice, int faces, int j) {
  if (dice < 0 || faces < 1 || j < 0) throw PreconditionError("Galton-Watson law needs D >= 0, F >= 1, j >= 0");
  Rational survive = 1;
  for (int k = 0; k < j; ++k) survive *= Rational(faces - 1, faces);
  std::vector<Rational> law(static_cast<std::size_t>(dice) + 1);
  Integer binomial = 1;
  for (int d = 0; d <= dice; ++d) {
    Rational p = Rational(binomial);
    for (int k = 0; k < dice - d; ++k) p *= 1 - survive;
    for (int k = 0; k < d; ++k) p *= survive;
    law[static_cast<std::size_t>(d)] = p;
    binomial = binomial * (dice - d) / (d + 1);
  }
  return law;
}

std::vector<Rational> brelan_live_dice_law(int dice, int faces, int casts, int j) {
  const RoundConfig config = RoundConfig::first(dice, faces, casts);
  std::vector<int> occupation(static_cast<std::size_t>(faces), 0);
  occupation.back() = dice;
  const Combination goal(occupation);
  const FateGraph graph = build_fate_graph(config);
  const auto density = fokker_planck_density<Rational>(tabulate(graph, one_goal_rule(goal, config), "brelan"), graph);
  const int k = std::min(j, density.kernel.last_layer());
  std::vector<Rational> law(static_cast<std::size_t>(dice) + 1, Rational(0));
  const auto& states = density.kernel.states(k);
  for (std::size_t i = 0; i < states.size(); ++i)
    law[static_cast<std::size_t>(dice - states[i].norm())] += density.rho[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(i));
  return law;
}

std::optional<std::filesystem::path> table_directory() {
  const char* dir = std::getenv("FATE421_TABLES");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir);
}

std::string table_file_name(Player player, int dice, int faces, int casts) {
  return to_string(player) + "-" + std::to_string(dice) + "-" + std::to_string(faces) + "-" + std::to_string(casts) + ".json";
}

std::shared_ptr<const ResultProbabilityTable> obtain_table(Player player, int dice, int faces, int casts,
                                                           unsigned threads) {
  if (auto dir = table_directory()) {
    const auto path = *dir / table_file_name(player, dice, faces, casts);
    if (std::filesystem::exists(path)) {
      auto table = std::make_shared<const ResultProbabilityTable>(ResultProbabilityTable::load(path));
      table->check_header(player, dice, faces, casts);
      return table;
    }
  }
  return std::make_shared<const ResultProbabilityTable>(
      ResultProbabilityTable::compile(player, dice, faces, casts, false, threads));
}

}  // namespace fate421
