#pragma once

// Decimal arbitrary-precision reals and outward-rounded intervals.
//
// A BigReal is sign * mantissa * 10^exponent together with the number of
// leading mantissa digits that are trusted. Interval endpoints are exact
// decimals; only interval_recip rounds, and it always rounds outward.

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace khinchin {

/// Guard digits added on top of the input precision for interval endpoints.
inline constexpr std::size_t kGuardDigits = 10;

enum class Rounding { Down, Up };

class BigReal {
 public:
  /// Zero with one trusted digit.
  BigReal();

  /// Value mantissa * 10^exponent (mantissa carries the sign). A precision of
  /// 0 means "all mantissa digits are trusted".
  BigReal(mpz_class mantissa, long exponent, std::size_t precision_digits = 0);

  static BigReal from_integer(const mpz_class& value);

  /// Decimal approximation of p/q with `digits` significant digits, rounded
  /// in the requested direction.
  static BigReal from_rational(const mpq_class& value, std::size_t digits, Rounding dir);

  const mpz_class& mantissa() const { return mantissa_; }
  long exponent() const { return exponent_; }
  int sign() const { return sgn(mantissa_); }
  bool is_zero() const { return sign() == 0; }
  std::size_t precision_digits() const { return precision_; }
  std::size_t mantissa_length() const { return length_; }
  std::string mantissa_digits() const;

  /// Power of ten of the last trusted digit.
  long ulp_exponent() const { return exponent_ + static_cast<long>(length_ - precision_); }

  mpq_class to_rational() const;

  /// Positional decimal rendering, e.g. "-0.00120". Keeps every mantissa digit.
  std::string render() const;

  /// Bit-exact equality: same mantissa, exponent and precision.
  friend bool operator==(const BigReal& a, const BigReal& b);

 private:
  mpz_class mantissa_;
  long exponent_ = 0;
  std::size_t precision_ = 1;
  std::size_t length_ = 1;
};

/// Numeric comparison (ignores representation and precision).
std::strong_ordering compare(const BigReal& a, const BigReal& b);

/// Parses [+-]digits[.digits] (either digit run may be empty, not both).
/// Precision is the count of significant digits; trailing zeros count.
/// Throws ParseError naming the offending character position.
BigReal parse_decimal(std::string_view text);

/// As above but with an explicit trusted precision (<= significant digits).
BigReal parse_decimal(std::string_view text, std::size_t precision_digits);

/// Exact sum and difference (no rounding).
BigReal add(const BigReal& a, const BigReal& b);
BigReal subtract(const BigReal& a, const BigReal& b);

mpz_class floor(const BigReal& x);

/// Correctly directed reciprocal with `digits` significant digits.
BigReal reciprocal(const BigReal& x, std::size_t digits, Rounding dir);

/// Exact number of decimal digits of |v| (1 for zero).
std::size_t decimal_length(const mpz_class& v);

class RealInterval {
 public:
  /// Throws DomainError unless lo <= hi.
  RealInterval(BigReal lo, BigReal hi);

  const BigReal& lo() const { return lo_; }
  const BigReal& hi() const { return hi_; }

  BigReal width() const { return subtract(hi_, lo_); }
  bool contains(const mpq_class& value) const;
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
  /// True when `inner` lies inside this interval.
  bool encloses(const RealInterval& inner) const;

  friend bool operator==(const RealInterval&, const RealInterval&) = default;

 private:
  BigReal lo_;
  BigReal hi_;
};

/// [x - u, x + u] with u half a unit in the last trusted digit place.
RealInterval to_interval(const BigReal& x);

/// Exact interval sum and difference.
RealInterval interval_add(const RealInterval& a, const RealInterval& b);
RealInterval interval_sub(const RealInterval& a, const RealInterval& b);
RealInterval interval_sub(const RealInterval& a, const mpz_class& n);

/// [1/hi, 1/lo] rounded outward to `working_digits` significant digits.
/// Throws DomainError("reciprocal of interval spanning zero").
RealInterval interval_recip(const RealInterval& iv, std::size_t working_digits);

/// Working precision defaults to the wider endpoint precision plus guard digits.
RealInterval interval_recip(const RealInterval& iv);

/// The common floor of both endpoints, or nullopt when they disagree.
std::optional<mpz_class> interval_floor(const RealInterval& iv);

}  // namespace khinchin
