#include "khinchin/quad.hpp"

#include <cstdio>
#include <string>

extern "C" {
#include <quadmath.h>
}

#include "khinchin/errors.hpp"

namespace khinchin::quad {

Real parse(std::string_view text) {
  std::string s(text);
  char* end = nullptr;
  Real v = strtoflt128(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') {
    throw ParseError("not a real number: " + s, static_cast<std::size_t>(end - s.c_str()));
  }
  return v;
}

namespace {
std::string print(const char* spec, Real value, int significant) {
  char fmt[16];
  std::snprintf(fmt, sizeof fmt, "%%.%d%s", significant, spec);
  char buf[128];
  quadmath_snprintf(buf, sizeof buf, fmt, value);
  return buf;
}
}  // namespace

std::string format(Real value, int significant) { return print("Qe", value, significant - 1); }
std::string format_general(Real value, int significant) { return print("Qg", value, significant); }

Real log(Real x) { return logq(x); }
Real log1p(Real x) { return log1pq(x); }
Real log2(Real x) { return log2q(x); }
Real exp(Real x) { return expq(x); }
Real expm1(Real x) { return expm1q(x); }
Real abs(Real x) { return fabsq(x); }

Real pi() {
  static const Real v = parse("3.14159265358979323846264338327950288419716939937510582");
  return v;
}

Real ln2() {
  static const Real v = parse("0.693147180559945309417232121458176568075500134360255254");
  return v;
}

Real epsilon() { return ldexpq(1, -112); }

Real ln(const mpz_class& value) {
  if (sgn(value) <= 0) throw DomainError("logarithm of a non-positive integer");
  if (mpz_fits_ulong_p(value.get_mpz_t())) return logq(static_cast<Real>(value.get_ui()));
  const std::size_t bits = mpz_sizeinbase(value.get_mpz_t(), 2);
  constexpr std::size_t kKeep = 113;
  mpz_class top;
  std::size_t shift = 0;
  if (bits > kKeep) {
    shift = bits - kKeep;
    mpz_tdiv_q_2exp(top.get_mpz_t(), value.get_mpz_t(), shift);
  } else {
    top = value;
  }
  // top < 2^113: split into two 64-bit halves, both exactly representable.
  mpz_class hi;
  mpz_tdiv_q_2exp(hi.get_mpz_t(), top.get_mpz_t(), 64);
  mpz_class lo;
  mpz_tdiv_r_2exp(lo.get_mpz_t(), top.get_mpz_t(), 64);
  const Real mant = ldexpq(static_cast<Real>(hi.get_ui()), 64) + static_cast<Real>(lo.get_ui());
  return logq(mant) + static_cast<Real>(shift) * ln2();
}

}  // namespace khinchin::quad
