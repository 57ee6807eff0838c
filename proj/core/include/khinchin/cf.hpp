#pragma once

// Continued-fraction expansions [a0; a1, a2, ...] and their convergents.

#include <cstddef>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "khinchin/numerics.hpp"

namespace khinchin {

enum class StopReason {
  FloorDisagreement,  ///< the enclosure no longer determines the next quotient
  FractionExhausted,  ///< fractional interval reached 0: input possibly rational
  LimitReached,       ///< caller's nmax
  Terminated,         ///< exact rational expansion ran to completion
};

const char* to_string(StopReason reason);

struct CFExpansion {
  mpz_class a0;
  /// a_1..a_n, each >= 1. Every entry is certified for its input.
  std::vector<mpz_class> quotients;
  std::size_t source_precision_digits = 0;
  StopReason stop = StopReason::Terminated;
  /// False only when even the integer part was undetermined by the input.
  bool a0_certified = true;

  std::size_t certified_len() const { return quotients.size(); }
  bool possibly_rational() const {
    return stop == StopReason::FractionExhausted || stop == StopReason::Terminated;
  }
};

struct Convergent {
  std::size_t index = 0;
  mpz_class p;
  mpz_class q;
};

/// Quotients shared by every real in to_interval(x). Iterates
/// iv <- interval_recip(iv - floor(iv)) at precision + kGuardDigits and stops
/// at the first floor disagreement, an exhausted fraction, or `nmax`.
CFExpansion expand_certified(const BigReal& x, std::optional<std::size_t> nmax = std::nullopt);

/// Canonical Euclidean expansion of p/q (last quotient >= 2 when n >= 1).
/// Throws DomainError when q < 1.
CFExpansion expand_exact_rational(const mpz_class& p, const mpz_class& q);

/// Expansion of the decimal string itself, read as an exact rational. Its
/// tail is not determined by the real the decimal approximates; this is the
/// convention of tools that expand a padded finite-precision value.
CFExpansion expand_decimal_exact(const BigReal& x);

/// Incremental convergent recurrence; holds only the last two convergents.
class ConvergentRecurrence {
 public:
  explicit ConvergentRecurrence(const mpz_class& a0);

  /// Advances to the next convergent using quotient a.
  void push(const mpz_class& a);

  std::size_t index() const { return index_; }
  const mpz_class& p() const { return p_; }
  const mpz_class& q() const { return q_; }
  const mpz_class& p_prev() const { return p_prev_; }
  const mpz_class& q_prev() const { return q_prev_; }
  Convergent current() const { return {index_, p_, q_}; }

 private:
  std::size_t index_ = 0;
  mpz_class p_prev_{1}, q_prev_{0};
  mpz_class p_, q_{1};
};

/// All n + 1 convergents P_k/Q_k, k = 0..n.
std::vector<Convergent> convergents(const CFExpansion& cf);

/// Enclosure of every real whose expansion begins with cf: the hull of
/// P_n/Q_n and the mediant (P_n + P_{n-1})/(Q_n + Q_{n-1}), rounded outward.
/// Width is below 1/Q_n^2.
RealInterval reconstruct(const CFExpansion& cf);

}  // namespace khinchin
