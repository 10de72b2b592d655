#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"
#include "fate421/round_rules.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace fate421 {

struct CellKey {
  int imposed = 0;
  Combination goal;
  Combination result;

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// p(J1, goal, j, result) for j = 0..J1 on one couple class.
struct Cell {
  bool defined = true;
  std::vector<Rational> by_delay;
};

struct Outcome {
  int delay = 0;
  Combination result;
  Rational probability;
};

/// Result probabilities of the optimal one-goal strategies, for goals of
/// every norm 0..D and every duration J1 = 0..J, stored per canonical couple
/// class.
class ResultProbabilityTable {
 public:
  static constexpr int format_version = 1;

  /// With `diagnostic`, next-player cells that dilemmas leave undefined are
  /// filled anyway under the shortlex dilemma tie-break, on the class
  /// representative, and flagged as such.
  static ResultProbabilityTable compile(Player player, int dice, int faces, int casts, bool diagnostic = false,
                                        unsigned threads = 1);

  Player player() const noexcept { return player_; }
  int dice() const noexcept { return dice_; }
  int faces() const noexcept { return faces_; }
  int casts() const noexcept { return casts_; }
  bool diagnostic() const noexcept { return diagnostic_; }
  const std::map<CellKey, Cell>& cells() const noexcept { return cells_; }

  /// Throws TableMismatch.
  void check_header(Player player, int dice, int faces, int casts) const;

  bool defined(int imposed, const Combination& goal, const Combination& result) const;
  /// Throws UndefinedCell on a cell dilemmas leave undefined.
  Rational query(int imposed, const Combination& goal, int delay, const Combination& result) const;
  /// p(J1, goal, j, goal) for j = 0..J1.
  std::vector<Rational> diagonal(int imposed, const Combination& goal) const;
  /// Nonzero p(J1, goal, j, d) over every (j, d), concrete faces; cached.
  /// Throws UndefinedCell if any cell of the goal is undefined.
  const std::vector<Outcome>& outcomes(int imposed, const Combination& goal) const;

  nlohmann::json to_json() const;
  static ResultProbabilityTable from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static ResultProbabilityTable load(const std::filesystem::path& path);

  /// Rows by goal class, then duration, result class and growing delay:
  /// imposed,goal,result,delay,exact,decimal
  std::string chart_csv(int digits = 5) const;

 private:
  ResultProbabilityTable(Player player, int dice, int faces, int casts, bool diagnostic);
  const Cell& cell(int imposed, const Combination& goal, const Combination& result) const;
  void check_query(int imposed, const Combination& goal, const Combination& result) const;

  Player player_ = Player::first;
  int dice_ = 0;
  int faces_ = 1;
  int casts_ = 0;
  bool diagnostic_ = false;
  std::map<CellKey, Cell> cells_;

  struct Expansions {
    std::mutex mutex;
    std::map<std::pair<int, Combination>, std::vector<Outcome>> outcomes;
  };
  std::shared_ptr<Expansions> expansions_ = std::make_shared<Expansions>();
};

/// s_i(J, d) = sum over j = 1..J of p_i(J, d, j, d).
Rational cumulative_diagonal(const ResultProbabilityTable& table, int imposed, const Combination& d);

struct PropertyCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  bool passed() const;
};

/// Identities of the result probabilities, normalization, class counts and,
/// given the other player's table as `companion`, the cumulative chain
/// s_1(J, d) > s_2(J, d) = p_2(J, d, J, d) > p_1(J, d, J, d) for J > 1.
PropertyReport verify_properties(const ResultProbabilityTable& table,
                                 const ResultProbabilityTable* companion = nullptr);

/// P(D_j = d) for d = 0..D: binomial with survival q1^j, q1 = 1 - 1/F.
std::vector<Rational> galton_watson_law(int dice, int faces, int j);

/// Live-dice law at time j of a first player ratcheting toward the brelan of
/// face F, read off the Fokker-Planck density of the round (D, F, J).
std::vector<Rational> brelan_live_dice_law(int dice, int faces, int casts, int j);

/// Directory named by FATE421_TABLES, if set.
std::optional<std::filesystem::path> table_directory();
/// "first-3-6-3.json"
std::string table_file_name(Player player, int dice, int faces, int casts);
/// Loads from FATE421_TABLES when a matching file exists, else compiles.
std::shared_ptr<const ResultProbabilityTable> obtain_table(Player player, int dice, int faces, int casts,
                                                           unsigned threads = 1);

}  // namespace fate421
