#include "khinchin/cf.hpp"

#include <utility>

#include "khinchin/errors.hpp"

namespace khinchin {

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::FloorDisagreement: return "floor_disagreement";
    case StopReason::FractionExhausted: return "fraction_exhausted";
    case StopReason::LimitReached: return "limit_reached";
    case StopReason::Terminated: return "terminated";
  }
  return "unknown";
}

CFExpansion expand_certified(const BigReal& x, std::optional<std::size_t> nmax) {
  if (x.precision_digits() < 2) {
    throw DomainError("certified expansion needs at least 2 trusted digits");
  }
  const std::size_t working = x.precision_digits() + kGuardDigits;

  CFExpansion cf;
  cf.source_precision_digits = x.precision_digits();

  RealInterval iv = to_interval(x);
  auto a0 = interval_floor(iv);
  if (!a0) {
    cf.a0 = floor(iv.lo());
    cf.a0_certified = false;
    cf.stop = StopReason::FloorDisagreement;
    return cf;
  }
  cf.a0 = std::move(*a0);
  RealInterval frac = interval_sub(iv, cf.a0);

  for (;;) {
    if (nmax && cf.quotients.size() >= *nmax) {
      cf.stop = StopReason::LimitReached;
      break;
    }
    if (frac.contains_zero()) {
      cf.stop = StopReason::FractionExhausted;
      break;
    }
    iv = interval_recip(frac, working);
    auto a = interval_floor(iv);
    if (!a) {
      cf.stop = StopReason::FloorDisagreement;
      break;
    }
    frac = interval_sub(iv, *a);
    cf.quotients.push_back(std::move(*a));
  }
  return cf;
}

CFExpansion expand_exact_rational(const mpz_class& p, const mpz_class& q) {
  if (sgn(q) <= 0) throw DomainError("denominator must be positive");
  CFExpansion cf;
  cf.stop = StopReason::Terminated;
  mpz_class num = p, den = q, a, r;
  mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  cf.a0 = a;
  num = den;
  den = r;
  while (sgn(den) != 0) {
    mpz_fdiv_qr(a.get_mpz_t(), r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    cf.quotients.push_back(a);
    num.swap(den);
    den.swap(r);
  }
  return cf;
}

CFExpansion expand_decimal_exact(const BigReal& x) {
  const mpq_class value = x.to_rational();
  CFExpansion cf = expand_exact_rational(value.get_num(), value.get_den());
  cf.source_precision_digits = x.precision_digits();
  return cf;
}

ConvergentRecurrence::ConvergentRecurrence(const mpz_class& a0) : p_(a0) {}

void ConvergentRecurrence::push(const mpz_class& a) {
  // P_k = a P_{k-1} + P_{k-2}; the older value is overwritten in place.
  mpz_addmul(p_prev_.get_mpz_t(), a.get_mpz_t(), p_.get_mpz_t());
  mpz_addmul(q_prev_.get_mpz_t(), a.get_mpz_t(), q_.get_mpz_t());
  p_.swap(p_prev_);
  q_.swap(q_prev_);
  ++index_;
}

std::vector<Convergent> convergents(const CFExpansion& cf) {
  std::vector<Convergent> out;
  out.reserve(cf.quotients.size() + 1);
  ConvergentRecurrence rec(cf.a0);
  out.push_back(rec.current());
  for (const auto& a : cf.quotients) {
    rec.push(a);
    out.push_back(rec.current());
  }
  return out;
}

RealInterval reconstruct(const CFExpansion& cf) {
  ConvergentRecurrence rec(cf.a0);
  for (const auto& a : cf.quotients) rec.push(a);

  mpq_class end(rec.p(), rec.q());
  mpq_class mediant(rec.p() + rec.p_prev(), rec.q() + rec.q_prev());
  end.canonicalize();
  mediant.canonicalize();
  if (mediant < end) std::swap(mediant, end);

  // Enough digits to resolve a width of 1/(Q_n (Q_n + Q_{n-1})).
  const std::size_t digits =
      2 * decimal_length(rec.q() + rec.q_prev()) + decimal_length(abs(rec.p()) + 1) + kGuardDigits;
  return RealInterval(BigReal::from_rational(end, digits, Rounding::Down),
                      BigReal::from_rational(mediant, digits, Rounding::Up));
}

}  // namespace khinchin
