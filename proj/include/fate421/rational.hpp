#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <Eigen/Dense>

#include <compare>
#include <string>
#include <string_view>

namespace fate421 {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
Scalar scalar_cast(const Rational& q) {
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return q;
  } else {
    return q.template convert_to<Scalar>();
  }
}

/// A rational number or minus infinity, the value rule-breaking histories take
/// in user-supplied utility tables.
class Extended {
 public:
  Extended() = default;
  Extended(Rational value) : value_(std::move(value)) {}  // NOLINT: implicit by design of arithmetic use
  Extended(long value) : value_(value) {}                  // NOLINT

  static Extended negative_infinity() {
    Extended e;
    e.neg_inf_ = true;
    return e;
  }

  bool finite() const noexcept { return !neg_inf_; }
  bool is_negative_infinity() const noexcept { return neg_inf_; }
  /// Throws Diagnostic when the value is -inf.
  const Rational& value() const;

  /// 0 * (-inf) is 0, as for excluded branches of the round.
  Extended scaled(const Rational& weight) const;

  friend bool operator==(const Extended& a, const Extended& b) {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }
  friend std::strong_ordering operator<=>(const Extended& a, const Extended& b) {
    if (a.neg_inf_ || b.neg_inf_) return b.neg_inf_ <=> a.neg_inf_;
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (b.value_ < a.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend Extended operator+(const Extended& a, const Extended& b) {
    if (a.neg_inf_ || b.neg_inf_) return negative_infinity();
    return Extended(a.value_ + b.value_);
  }

 private:
  Rational value_{0};
  bool neg_inf_ = false;
};

/// Parses "num/den", "num", or a plain decimal such as "0.25". Reduces.
Rational parse_rational(std::string_view text);
/// Like parse_rational, plus "-inf".
Extended parse_extended(std::string_view text);

/// "num/den", or "num" for integers.
std::string to_string(const Rational& q);
std::string to_string(const Extended& e);

enum class Rounding { half_even, truncate };

/// Fixed-point decimal with `digits` digits after the point.
std::string to_decimal(const Rational& q, int digits, Rounding mode = Rounding::half_even);

/// Decimal at the precision of `reference` (its number of fractional digits),
/// e.g. rounded_like(q, "3.7467") has four decimals.
std::string rounded_like(const Rational& q, std::string_view reference,
                         Rounding mode = Rounding::half_even);

double to_double(const Rational& q);

}  // namespace fate421
