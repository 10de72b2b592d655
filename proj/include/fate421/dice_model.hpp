#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"

#include <compare>
#include <span>
#include <vector>

namespace fate421 {

/// Multinomial law of one cast of |c| unloaded F-faced dice:
///   p(c) = F^-|c| * |c|! / prod_f c_f!
Rational cast_probability(const Combination& c);
/// Same law on a raw occupation vector; throws InvalidCombination on a
/// negative entry.
Rational cast_probability(std::span<const int> occupation);

struct Cast {
  Combination combination;
  Rational probability;
};

/// Every outcome of casting n dice with its probability, in Eulerian order.
std::vector<Cast> enumerate_casts(int n, int faces);

/// Hierarchic order of full-norm combinations. With three six-sided dice this
/// is the rule order (421 > 111 > 611 > 666 > ... > sequences > others, 221
/// last); for any other (D, F) it is the order of the numbers formed by the
/// faces in decreasing sequence. `greater` means a ranks higher than b.
std::strong_ordering hierarchic_compare(const Combination& a, const Combination& b);

/// Position in the hierarchic order among all combinations of the same norm,
/// 1 being the highest.
int hierarchic_rank(const Combination& c);

/// Tokens given by the transfer table when `highest` is the highest
/// combination of the set. Three six-sided dice only.
int transfer_tokens(const Combination& highest);

bool is_sequence(const Combination& c);

/// Representative of the face-permutation class of c: the class member whose
/// face list has the smallest face sum.
Combination canonical_class(const Combination& c);

struct CoupleClass {
  Combination goal;
  Combination result;
  /// witness[f - 1] is the face that representative face f maps to, so
  /// goal.permuted(witness) and result.permuted(witness) give back the queried
  /// couple.
  std::vector<int> witness;
};

/// Canonical representative of the couple (goal, result) under a common face
/// permutation: goal face sum minimized first, result face sum second.
CoupleClass canonical_couple(const Combination& goal, const Combination& result);

/// One representative per couple class of full-norm combinations.
std::vector<CoupleClass> enumerate_couple_classes(int dice, int faces);
/// Same, for couples of norm n (used for the renormalized sub-rounds).
std::vector<CoupleClass> enumerate_couple_classes_of_norm(int n, int faces);

}  // namespace fate421
