#include "fate421/dice_model.hpp"

#include "fate421/errors.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <tuple>

namespace fate421 {

namespace {

Integer factorial(int n) {
  Integer r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

Integer power(int base, int exponent) {
  Integer r = 1;
  for (int k = 0; k < exponent; ++k) r *= base;
  return r;
}

}  // namespace

Rational cast_probability(std::span<const int> occupation) {
  if (occupation.empty()) throw InvalidCombination("face count must be >= 1");
  int norm = 0;
  Integer redundancy_den = 1;
  for (int n : occupation) {
    if (n < 0) throw InvalidCombination("negative occupation number");
    norm += n;
    redundancy_den *= factorial(n);
  }
  return Rational(factorial(norm), redundancy_den * power(static_cast<int>(occupation.size()), norm));
}

Rational cast_probability(const Combination& c) { return cast_probability(c.occupation()); }

std::vector<Cast> enumerate_casts(int n, int faces) {
  std::vector<Cast> out;
  for (auto& c : combinations_of_norm(n, faces)) {
    Rational p = cast_probability(c);
    out.push_back({std::move(c), std::move(p)});
  }
  return out;
}

bool is_sequence(const Combination& c) {
  auto faces = c.increasing_faces();
  if (faces.size() < 2) return false;
  for (std::size_t i = 1; i < faces.size(); ++i)
    if (faces[i] != faces[i - 1] + 1) return false;
  return true;
}

namespace {

bool rules_apply(const Combination& c) { return c.norm() == 3 && c.faces() == 6; }

// Higher key ranks higher.
std::tuple<int, std::vector<int>> hierarchic_key(const Combination& c) {
  auto decreasing = c.increasing_faces();
  std::reverse(decreasing.begin(), decreasing.end());
  if (!rules_apply(c)) return {0, decreasing};

  static const std::array<const char*, 12> specials = {"421", "111", "611", "666", "511", "555",
                                                       "411", "444", "311", "333", "211", "222"};
  const std::string text = c.to_string();
  for (std::size_t i = 0; i < specials.size(); ++i)
    if (text == specials[i]) return {3, {static_cast<int>(specials.size() - i)}};
  if (is_sequence(c)) return {2, decreasing};
  return {1, decreasing};
}

}  // namespace

std::strong_ordering hierarchic_compare(const Combination& a, const Combination& b) {
  if (a.faces() != b.faces() || a.norm() != b.norm())
    throw InvalidComparison("hierarchic order compares combinations of equal norm only ('" + a.to_string() +
                            "' vs '" + b.to_string() + "')");
  return hierarchic_key(a) <=> hierarchic_key(b);
}

int hierarchic_rank(const Combination& c) {
  int higher = 0;
  for (const auto& other : combinations_of_norm(c.norm(), c.faces()))
    if (hierarchic_compare(other, c) == std::strong_ordering::greater) ++higher;
  return higher + 1;
}

int transfer_tokens(const Combination& highest) {
  if (!rules_apply(highest))
    throw InvalidComparison("transfer table is defined for three six-sided dice, got '" + highest.to_string() + "'");
  const std::string text = highest.to_string();
  if (text == "421") return 10;
  if (text == "111") return 7;
  auto faces = highest.increasing_faces();
  if (faces[0] == 1 && faces[1] == 1) return faces[2];  // f11
  if (highest.is_brelan()) return faces[0];
  if (is_sequence(highest)) return 2;
  return 1;
}

Combination canonical_class(const Combination& c) {
  auto counts = c.occupation();
  std::sort(counts.begin(), counts.end(), std::greater<>());
  return Combination(std::move(counts));
}

CoupleClass canonical_couple(const Combination& goal, const Combination& result) {
  if (goal.faces() != result.faces() || goal.norm() != result.norm())
    throw InvalidComparison("couple members must have equal norms ('" + goal.to_string() + "', '" +
                            result.to_string() + "')");
  const int faces = goal.faces();
  std::vector<int> order(static_cast<std::size_t>(faces));
  std::iota(order.begin(), order.end(), 1);
  std::stable_sort(order.begin(), order.end(), [&](int f, int g) {
    if (goal.count(f) != goal.count(g)) return goal.count(f) > goal.count(g);
    return result.count(f) > result.count(g);
  });

  std::vector<int> g(static_cast<std::size_t>(faces)), r(static_cast<std::size_t>(faces));
  for (std::size_t i = 0; i < order.size(); ++i) {
    g[i] = goal.count(order[i]);
    r[i] = result.count(order[i]);
  }
  return {Combination(std::move(g)), Combination(std::move(r)), std::move(order)};
}

std::vector<CoupleClass> enumerate_couple_classes_of_norm(int n, int faces) {
  const auto all = combinations_of_norm(n, faces);
  std::map<std::pair<Combination, Combination>, CoupleClass> classes;
  for (const auto& goal : all) {
    for (const auto& result : all) {
      auto cls = canonical_couple(goal, result);
      auto key = std::make_pair(cls.goal, cls.result);
      if (!classes.contains(key)) {
        std::vector<int> identity(static_cast<std::size_t>(faces));
        std::iota(identity.begin(), identity.end(), 1);
        classes.emplace(std::move(key), CoupleClass{cls.goal, cls.result, std::move(identity)});
      }
    }
  }
  std::vector<CoupleClass> out;
  out.reserve(classes.size());
  for (auto& [key, cls] : classes) out.push_back(std::move(cls));
  return out;
}

std::vector<CoupleClass> enumerate_couple_classes(int dice, int faces) {
  if (dice < 1 || faces < 1) throw InvalidConfig("couple classes need D >= 1 and F >= 1");
  return enumerate_couple_classes_of_norm(dice, faces);
}

}  // namespace fate421
