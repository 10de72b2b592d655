#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fate421 {

/// A multiset of die faces, stored in Eulerian form: the occupation number of
/// every face 1..F. The Lagrangian form is the list of faces.
///
/// Combinations are totally ordered by their Eulerian vectors
/// (lexicographically), which is the enumeration order used everywhere a
/// deterministic order is needed.
class Combination {
 public:
  Combination() = default;
  /// The empty combination over `faces` faces.
  explicit Combination(int faces);
  /// Throws InvalidCombination on a negative entry.
  explicit Combination(std::vector<int> occupation);

  /// Lagrangian constructor: faces are 1-based.
  static Combination from_faces(std::span<const int> faces, int face_count);
  /// Accepts "421" (any order) when F <= 9, a bracketed list "[12,3,3]"
  /// for any F, and "" or "-" for the empty combination.
  static Combination parse(std::string_view text, int face_count);

  int faces() const noexcept { return static_cast<int>(occupation_.size()); }
  int norm() const noexcept { return norm_; }
  bool empty() const noexcept { return norm_ == 0; }
  /// Occupation number of a 1-based face.
  int count(int face) const { return occupation_.at(static_cast<std::size_t>(face - 1)); }
  const std::vector<int>& occupation() const noexcept { return occupation_; }

  /// Faces in increasing order, e.g. 421 -> {1, 2, 4}.
  std::vector<int> increasing_faces() const;
  int face_sum() const;
  int distinct_faces() const;
  bool is_brelan() const;

  /// Faces in nonincreasing order ("421"), or "[12,3,3]" when F > 9.
  std::string to_string() const;

  /// Componentwise order: every occupation number of *this is <= other's.
  bool within(const Combination& other) const;

  /// Relabels faces: face f of *this becomes face image[f - 1].
  Combination permuted(std::span<const int> image) const;

  Combination& operator+=(const Combination& other);
  /// Throws InvalidCombination if the difference is not a combination.
  Combination& operator-=(const Combination& other);
  friend Combination operator+(Combination a, const Combination& b) { return a += b; }
  friend Combination operator-(Combination a, const Combination& b) { return a -= b; }

  /// The single-die combination showing `face`.
  static Combination unit(int face, int face_count);

  friend bool operator==(const Combination&, const Combination&) = default;
  friend std::strong_ordering operator<=>(const Combination& a, const Combination& b) {
    return a.occupation_ <=> b.occupation_;
  }

 private:
  std::vector<int> occupation_;
  int norm_ = 0;
};

/// Componentwise minimum (the meet of the canonic order).
Combination meet(const Combination& a, const Combination& b);

/// Tie-break order between decisions: increasing Lagrangian lists compared
/// shortest first, then lexicographically. {6,6} precedes {5,6,6}; {1,2}
/// precedes {1,4}.
bool lagrangian_less(const Combination& a, const Combination& b);

/// All combinations of norm n over F faces, in Eulerian lexicographic order.
std::vector<Combination> combinations_of_norm(int n, int faces);
/// All combinations of norm <= n, by norm then Eulerian order.
std::vector<Combination> combinations_up_to(int n, int faces);
/// All k with 0 <= k <= c componentwise, in Eulerian order.
std::vector<Combination> subcombinations(const Combination& c);

struct CombinationHash {
  std::size_t operator()(const Combination& c) const noexcept;
};

}  // namespace fate421
