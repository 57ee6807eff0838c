#pragma once

// Fixed ~34-significant-digit reals for the statistics layer (binary128).

#include <string>
#include <string_view>

#include <gmpxx.h>

namespace khinchin {

using Real = __float128;

namespace quad {

Real parse(std::string_view text);
/// Scientific rendering with `significant` digits, e.g. "2.6854520010653064e+00".
std::string format(Real value, int significant = 17);
/// Shortest-style rendering ("%.{n}Qg") used for CSV columns.
std::string format_general(Real value, int significant = 17);

Real log(Real x);
Real log1p(Real x);
Real log2(Real x);
Real exp(Real x);
Real expm1(Real x);
Real abs(Real x);

Real pi();
Real ln2();
Real epsilon();

/// Natural log of a positive big integer from its bit length and leading
/// 113 bits; relative error is at the binary128 rounding level.
Real ln(const mpz_class& value);

inline double to_double(Real x) { return static_cast<double>(x); }

}  // namespace quad
}  // namespace khinchin
