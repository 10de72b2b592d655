#include "fate421/rational.hpp"

#include "fate421/errors.hpp"

#include <algorithm>
#include <cctype>

namespace fate421 {

const Rational& Extended::value() const {
  if (neg_inf_) throw Diagnostic("-inf utility surfaced in a value");
  return value_;
}

Extended Extended::scaled(const Rational& weight) const {
  if (weight == 0) return Extended(Rational(0));
  if (neg_inf_) {
    if (weight < 0) throw Diagnostic("negative weight applied to -inf");
    return negative_infinity();
  }
  return Extended(value_ * weight);
}

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

Integer parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw FormatError("not an integer: '" + std::string(s) + "'");
  Integer v{std::string(s)};
  return negative ? Integer(-v) : v;
}

Integer pow10(int digits) {
  Integer p = 1;
  for (int i = 0; i < digits; ++i) p *= 10;
  return p;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw FormatError("empty rational");

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw FormatError("zero denominator in '" + std::string(text) + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (negative || (!whole.empty() && whole.front() == '+')) whole.remove_prefix(1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)))
      throw FormatError("not a decimal: '" + std::string(text) + "'");
    Integer scale = pow10(static_cast<int>(frac.size()));
    Integer num = Integer(std::string(whole)) * scale + (frac.empty() ? Integer(0) : Integer(std::string(frac)));
    Rational q(num, scale);
    return negative ? Rational(-q) : q;
  }
  return Rational(parse_integer(text));
}

Extended parse_extended(std::string_view text) {
  if (text == "-inf" || text == "-infinity") return Extended::negative_infinity();
  return Extended(parse_rational(text));
}

std::string to_string(const Rational& q) { return q.str(); }

std::string to_string(const Extended& e) {
  return e.finite() ? to_string(e.value()) : std::string("-inf");
}

std::string to_decimal(const Rational& q, int digits, Rounding mode) {
  if (digits < 0) throw PreconditionError("negative digit count");
  const bool negative = q < 0;
  const Rational magnitude = negative ? Rational(-q) : q;
  const Integer scale = pow10(digits);
  const Rational scaled = magnitude * Rational(scale);
  Integer whole = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  if (mode == Rounding::half_even) {
    const Rational rest = scaled - Rational(whole);
    const Rational half(1, 2);
    if (rest > half || (rest == half && whole % 2 == 1)) whole += 1;
  }

  std::string digits_text = whole.str();
  if (static_cast<int>(digits_text.size()) <= digits)
    digits_text.insert(0, static_cast<std::size_t>(digits + 1) - digits_text.size(), '0');
  std::string out = digits_text.substr(0, digits_text.size() - digits);
  if (digits > 0) out += "." + digits_text.substr(digits_text.size() - digits);
  if (negative && whole != 0) out.insert(0, "-");
  return out;
}

std::string rounded_like(const Rational& q, std::string_view reference, Rounding mode) {
  auto dot = reference.find('.');
  int digits = dot == std::string_view::npos ? 0 : static_cast<int>(reference.size() - dot - 1);
  return to_decimal(q, digits, mode);
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace fate421
