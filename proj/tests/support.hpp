#pragma once

#include "fate421/combination.hpp"
#include "fate421/rational.hpp"

#include <doctest.h>

#include <ostream>
#include <string_view>

namespace fate421 {

inline std::ostream& operator<<(std::ostream& os, const Combination& c) {
  return os << (c.empty() ? std::string("-") : c.to_string());
}

}  // namespace fate421

namespace testing {

inline fate421::Combination C(std::string_view text, int faces = 6) { return fate421::Combination::parse(text, faces); }
inline fate421::Rational Q(std::string_view text) { return fate421::parse_rational(text); }

}  // namespace testing
