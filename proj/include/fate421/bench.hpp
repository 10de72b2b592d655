#pragma once

#include "fate421/rational.hpp"
#include "fate421/workbench.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fate421 {

struct BenchRow {
  /// "goalid:h0s0", ... or "max-moy"
  std::string policy;
  std::optional<Rational> first;
  std::optional<Rational> next;
};

struct BenchTable {
  std::string title;
  std::string utility;
  Rational optimum;
  std::vector<BenchRow> rows;

  const BenchRow& row(std::string_view policy) const;
};

/// The four benchmark utilities at (D, F, J): one goal 123, goals
/// 123 + 224 + 345, transfer and sum of faces (the last two need (3, 6)).
std::vector<std::pair<std::string, std::string>> bench_utilities(int dice, int faces);

/// Ratios to the first-player optimum of every goal-identification policy and
/// of max-moy, for both players; next-player s = 1 rows stay empty.
std::vector<BenchTable> run_bench(Workbench& bench, int dice = 3, int faces = 6, int casts = 3);

std::string format_bench(const std::vector<BenchTable>& tables, int digits = 5);
nlohmann::json bench_json(const std::vector<BenchTable>& tables, int digits = 5);

}  // namespace fate421
