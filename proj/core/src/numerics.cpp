#include "khinchin/numerics.hpp"

#include <algorithm>
#include <unordered_map>
#include <utility>

#include "khinchin/errors.hpp"

namespace khinchin {
namespace {

// Powers of ten recur constantly in the continued-fraction loop (the same
// handful of exponents each step), so keep a small per-thread cache.
mpz_class pow10(unsigned long n) {
  if (n < 19) {
    unsigned long long v = 1;
    for (unsigned long i = 0; i < n; ++i) v *= 10;
    return mpz_class(static_cast<unsigned long>(v));
  }
  thread_local std::unordered_map<unsigned long, mpz_class> cache;
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  if (cache.size() >= 32) cache.clear();
  mpz_class v;
  mpz_ui_pow_ui(v.get_mpz_t(), 10, n);
  cache.emplace(n, v);
  return v;
}

mpz_class scale(const mpz_class& m, long shift) {
  if (shift == 0) return m;
  return m * pow10(static_cast<unsigned long>(shift));
}

}  // namespace

std::size_t decimal_length(const mpz_class& v) {
  if (sgn(v) == 0) return 1;
  std::size_t d = mpz_sizeinbase(v.get_mpz_t(), 10);
  if (d > 1) {
    mpz_class bound = pow10(d - 1);
    if (mpz_cmpabs(v.get_mpz_t(), bound.get_mpz_t()) < 0) --d;
  }
  return d;
}

BigReal::BigReal() : mantissa_(0) {}

BigReal::BigReal(mpz_class mantissa, long exponent, std::size_t precision_digits)
    : mantissa_(std::move(mantissa)), exponent_(exponent) {
  length_ = decimal_length(mantissa_);
  precision_ = precision_digits == 0 ? length_ : precision_digits;
  if (precision_ > length_) {
    throw DomainError("precision of " + std::to_string(precision_) +
                      " digits exceeds mantissa length " + std::to_string(length_));
  }
}

BigReal BigReal::from_integer(const mpz_class& value) { return BigReal(value, 0); }

BigReal BigReal::from_rational(const mpq_class& value, std::size_t digits, Rounding dir) {
  if (digits == 0) throw DomainError("from_rational needs at least one digit");
  const mpz_class& num = value.get_num();
  const mpz_class& den = value.get_den();
  if (sgn(num) == 0) return BigReal();
  const bool negative = sgn(num) < 0;
  mpz_class mag = abs(num);
  long k = static_cast<long>(digits) -
           (static_cast<long>(decimal_length(mag)) - static_cast<long>(decimal_length(den)));
  mpz_class q, r;
  if (k >= 0) {
    mpz_class n = scale(mag, k);
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), n.get_mpz_t(), den.get_mpz_t());
  } else {
    mpz_class d = scale(den, -k);
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), mag.get_mpz_t(), d.get_mpz_t());
  }
  const bool away = negative ? dir == Rounding::Down : dir == Rounding::Up;
  if (sgn(r) != 0 && away) ++q;
  if (negative) q = -q;
  return BigReal(std::move(q), -k);
}

std::string BigReal::mantissa_digits() const {
  mpz_class mag = abs(mantissa_);
  return mag.get_str(10);
}

mpq_class BigReal::to_rational() const {
  if (exponent_ >= 0) return mpq_class(scale(mantissa_, exponent_));
  mpq_class q(mantissa_, pow10(static_cast<unsigned long>(-exponent_)));
  q.canonicalize();
  return q;
}

std::string BigReal::render() const {
  std::string digits = mantissa_digits();
  std::string out = sign() < 0 ? "-" : "";
  if (exponent_ >= 0) {
    out += digits;
    if (sign() != 0) out.append(static_cast<std::size_t>(exponent_), '0');
    return out;
  }
  const auto frac_len = static_cast<std::size_t>(-exponent_);
  if (digits.size() > frac_len) {
    digits.insert(digits.size() - frac_len, 1, '.');
    return out + digits;
  }
  return out + "0." + std::string(frac_len - digits.size(), '0') + digits;
}

bool operator==(const BigReal& a, const BigReal& b) {
  return a.exponent_ == b.exponent_ && a.precision_ == b.precision_ && a.mantissa_ == b.mantissa_;
}

std::strong_ordering compare(const BigReal& a, const BigReal& b) {
  if (a.sign() != b.sign() || a.sign() == 0) return a.sign() <=> b.sign();
  const long e = std::min(a.exponent(), b.exponent());
  const int c = cmp(scale(a.mantissa(), a.exponent() - e), scale(b.mantissa(), b.exponent() - e));
  return c <=> 0;
}

BigReal parse_decimal(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  digits.reserve(text.size());
  std::size_t frac_len = 0;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) ++frac_len;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      throw ParseError("unexpected character '" + std::string(1, c) + "' at position " +
                           std::to_string(i),
                       i);
    }
  }
  if (digits.empty()) throw ParseError("no digits in decimal string", text.size());

  mpz_class mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  return BigReal(std::move(mantissa), -static_cast<long>(frac_len));
}

BigReal parse_decimal(std::string_view text, std::size_t precision_digits) {
  BigReal x = parse_decimal(text);
  if (precision_digits == 0 || precision_digits > x.precision_digits()) {
    throw DomainError("precision " + std::to_string(precision_digits) + " not in [1, " +
                      std::to_string(x.precision_digits()) + "]");
  }
  return BigReal(x.mantissa(), x.exponent(), precision_digits);
}

BigReal add(const BigReal& a, const BigReal& b) {
  const long e = std::min(a.exponent(), b.exponent());
  return BigReal(scale(a.mantissa(), a.exponent() - e) + scale(b.mantissa(), b.exponent() - e), e);
}

BigReal subtract(const BigReal& a, const BigReal& b) {
  const long e = std::min(a.exponent(), b.exponent());
  return BigReal(scale(a.mantissa(), a.exponent() - e) - scale(b.mantissa(), b.exponent() - e), e);
}

mpz_class floor(const BigReal& x) {
  if (x.exponent() >= 0) return scale(x.mantissa(), x.exponent());
  mpz_class q;
  mpz_class d = pow10(static_cast<unsigned long>(-x.exponent()));
  mpz_fdiv_q(q.get_mpz_t(), x.mantissa().get_mpz_t(), d.get_mpz_t());
  return q;
}

BigReal reciprocal(const BigReal& x, std::size_t digits, Rounding dir) {
  if (x.is_zero()) throw DomainError("reciprocal of zero");
  if (digits == 0) throw DomainError("reciprocal needs at least one digit");
  // 10^k / |m| has `digits` or `digits + 1` digits for this k.
  const long k = static_cast<long>(x.mantissa_length() + digits) - 1;
  mpz_class mag = abs(x.mantissa());
  mpz_class numerator = pow10(static_cast<unsigned long>(k));
  mpz_class q, r;
  mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), numerator.get_mpz_t(), mag.get_mpz_t());
  const bool negative = x.sign() < 0;
  const bool away = negative ? dir == Rounding::Down : dir == Rounding::Up;
  if (sgn(r) != 0 && away) ++q;
  if (negative) q = -q;
  return BigReal(std::move(q), -k - x.exponent());
}

RealInterval::RealInterval(BigReal lo, BigReal hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (compare(lo_, hi_) > 0) {
    throw DomainError("interval lower bound " + lo_.render() + " exceeds upper bound " + hi_.render());
  }
}

bool RealInterval::contains(const mpq_class& value) const {
  return lo_.to_rational() <= value && value <= hi_.to_rational();
}

bool RealInterval::encloses(const RealInterval& inner) const {
  return compare(lo_, inner.lo()) <= 0 && compare(inner.hi(), hi_) <= 0;
}

RealInterval to_interval(const BigReal& x) {
  const BigReal half_ulp(5, x.ulp_exponent() - 1);
  return RealInterval(subtract(x, half_ulp), add(x, half_ulp));
}

RealInterval interval_add(const RealInterval& a, const RealInterval& b) {
  return RealInterval(add(a.lo(), b.lo()), add(a.hi(), b.hi()));
}

RealInterval interval_sub(const RealInterval& a, const RealInterval& b) {
  return RealInterval(subtract(a.lo(), b.hi()), subtract(a.hi(), b.lo()));
}

RealInterval interval_sub(const RealInterval& a, const mpz_class& n) {
  const BigReal shift = BigReal::from_integer(n);
  return RealInterval(subtract(a.lo(), shift), subtract(a.hi(), shift));
}

RealInterval interval_recip(const RealInterval& iv, std::size_t working_digits) {
  if (iv.contains_zero()) throw DomainError("reciprocal of interval spanning zero");
  return RealInterval(reciprocal(iv.hi(), working_digits, Rounding::Down),
                      reciprocal(iv.lo(), working_digits, Rounding::Up));
}

RealInterval interval_recip(const RealInterval& iv) {
  const std::size_t p = std::max(iv.lo().precision_digits(), iv.hi().precision_digits());
  return interval_recip(iv, p + kGuardDigits);
}

std::optional<mpz_class> interval_floor(const RealInterval& iv) {
  mpz_class lo = floor(iv.lo());
  if (lo != floor(iv.hi())) return std::nullopt;
  return lo;
}

}  // namespace khinchin
