#include "khinchin/stats.hpp"

#include <array>
#include <cmath>
#include <string>

extern "C" {
#include <quadmath.h>
}

#include <boost/math/special_functions/gamma.hpp>

#include "khinchin/errors.hpp"

namespace khinchin {
namespace {

// x^-s (a ln x + b); closed under differentiation.
struct LogPower {
  Real s, a, b;

  Real eval(Real x) const { return powq(x, -s) * (a * logq(x) + b); }
  LogPower derivative() const { return {s + 1, -s * a, a - s * b}; }

  // Integral over [x, inf) of t^-s (|a| ln t + |b|), or signed when !absolute.
  Real tail_integral(Real x, bool absolute = false) const {
    const Real k = s - 1;
    const Real aa = absolute ? fabsq(a) : a;
    const Real bb = absolute ? fabsq(b) : b;
    return powq(x, -k) * (aa * (logq(x) / k + 1 / (k * k)) + bb / k);
  }
};

struct TailSum {
  Real value;
  Real error;
};

// sum_{m > M} m^-s ln m by Euler-Maclaurin through the B_6 term. The
// remainder is bounded by 2 zeta(6)/(2 pi)^6 * integral |h^(6)| = (1/30240) * ...
TailSum log_power_tail(Real M, int s) {
  const LogPower h{static_cast<Real>(s), 1, 0};
  Real sum = h.tail_integral(M) - h.eval(M) / 2;
  const std::array<Real, 3> weights = {Real(1) / 12, Real(-1) / 720, Real(1) / 30240};
  LogPower odd = h.derivative();
  for (Real w : weights) {
    sum -= w * odd.eval(M);
    odd = odd.derivative().derivative();
  }
  LogPower sixth = h;
  for (int i = 0; i < 6; ++i) sixth = sixth.derivative();
  return {sum, sixth.tail_integral(M, true) / 30240};
}

// Coefficients of ln(1 + 1/(x(x+2))) = 2 ln(1+y) - ln(1+2y) = sum c_k y^k, y = 1/x.
constexpr int kSeriesTerms = 12;

Real series_coefficient(int k) {
  const Real mag = (ldexpq(1, k) - 2) / k;
  return (k % 2 == 0) ? mag : -mag;
}

}  // namespace

ConstantEstimate khinchin_constant(std::size_t terms, std::optional<double> requested_bound) {
  if (terms < 1000) {
    throw DomainError("khinchin_constant needs at least 1000 terms, got " + std::to_string(terms));
  }
  // Neumaier summation keeps the rounding error independent of the term count.
  Real sum = 0, comp = 0;
  for (std::size_t m = 2; m <= terms; ++m) {
    const Real x = static_cast<Real>(m);
    const Real term = log2q(x) * log1pq(1 / (x * (x + 2)));
    const Real t = sum + term;
    comp += fabsq(sum) >= fabsq(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  sum += comp;

  const Real M = static_cast<Real>(terms);
  const Real ln2 = quad::ln2();
  Real tail = 0, tail_err = 0;
  for (int k = 2; k <= kSeriesTerms; ++k) {
    const Real c = series_coefficient(k);
    const TailSum part = log_power_tail(M, k);
    tail += c * part.value;
    tail_err += fabsq(c) * part.error;
  }
  tail /= ln2;
  tail_err /= ln2;

  // Dropped series terms: |r(x)| <= (2/x)^(K+1) / ((K+1)(1 - 2/x)).
  const int next = kSeriesTerms + 1;
  const LogPower dropped{static_cast<Real>(next), 1, 0};
  const Real trunc = ldexpq(1, next) / (next * (1 - 2 / M)) * dropped.tail_integral(M) / ln2;

  const Real eps = quad::epsilon();
  const Real rounding = 16 * eps + 16 * M * eps * eps + 64 * eps * fabsq(tail);
  const Real ln_err = tail_err + trunc + rounding;

  const Real value = expq(sum + tail);
  const Real bound = value * expm1q(ln_err) + 4 * eps * value;
  if (requested_bound && bound > static_cast<Real>(*requested_bound)) {
    throw AccuracyError("requested bound " + quad::format(*requested_bound, 3) +
                            " is below the achievable bound " + quad::format(bound, 3) + " with " +
                            std::to_string(terms) + " terms",
                        static_cast<double>(bound));
  }
  return {value, bound};
}

Real levy_constant() {
  const Real pi = quad::pi();
  return expq(pi * pi / (12 * quad::ln2()));
}

const ConstantEstimate& khinchin_reference() {
  static const ConstantEstimate k0 = khinchin_constant(100000);
  return k0;
}

Real levy_reference() {
  static const Real l0 = levy_constant();
  return l0;
}

namespace {
void check_stride(std::size_t stride) {
  if (stride == 0) throw DomainError("stride must be at least 1");
}

bool on_grid(std::size_t m, std::size_t n, std::size_t stride) {
  return m % stride == 0 || m == n;
}
}  // namespace

StatSeries khinchin_series(const CFExpansion& cf, std::size_t stride) {
  check_stride(stride);
  const std::size_t n = cf.certified_len();
  if (n == 0) throw DomainError("khinchin_series needs at least one partial quotient");
  StatSeries out{StatKind::Khinchin, {}, khinchin_reference().value};
  out.values.reserve(n / stride + 1);
  Real log_sum = 0;
  for (std::size_t m = 1; m <= n; ++m) {
    log_sum += quad::ln(cf.quotients[m - 1]);
    if (on_grid(m, n, stride)) out.values.push_back({m, expq(log_sum / static_cast<Real>(m))});
  }
  return out;
}

StatSeries levy_series(std::span<const Convergent> convergents, std::size_t stride) {
  check_stride(stride);
  std::size_t n = 0;
  for (const auto& c : convergents) n = std::max(n, c.index);
  if (n == 0) throw DomainError("levy_series needs a convergent with index >= 1");
  StatSeries out{StatKind::Levy, {}, levy_reference()};
  for (const auto& c : convergents) {
    if (c.index == 0 || !on_grid(c.index, n, stride)) continue;
    out.values.push_back({c.index, expq(quad::ln(c.q) / static_cast<Real>(c.index))});
  }
  return out;
}

StatSeries levy_series(const CFExpansion& cf, std::size_t stride) {
  check_stride(stride);
  const std::size_t n = cf.certified_len();
  if (n == 0) throw DomainError("levy_series needs at least one partial quotient");
  StatSeries out{StatKind::Levy, {}, levy_reference()};
  out.values.reserve(n / stride + 1);
  ConvergentRecurrence rec(cf.a0);
  for (std::size_t m = 1; m <= n; ++m) {
    rec.push(cf.quotients[m - 1]);
    if (on_grid(m, n, stride)) {
      out.values.push_back({m, expq(quad::ln(rec.q()) / static_cast<Real>(m))});
    }
  }
  return out;
}

SignChangeRecord sign_changes(const StatSeries& series) {
  if (series.values.empty()) throw DomainError("sign_changes of an empty series");
  SignChangeRecord out;
  out.cumulative.reserve(series.values.size());
  const Real tol = kSignTolerance;
  int previous = 0;
  for (const auto& pt : series.values) {
    const Real diff = series.reference_constant - pt.value;
    const int s = fabsq(diff) < tol ? 0 : (diff > 0 ? 1 : -1);
    if (s != 0) {
      if (previous != 0 && s != previous) out.flip_indices.push_back(pt.m);
      previous = s;
    }
    out.cumulative.emplace_back(pt.m, out.flip_indices.size());
  }
  return out;
}

FitResult powerlaw_fit(const StatSeries& series, std::size_t m_min) {
  std::vector<std::pair<Real, Real>> pts;
  for (const auto& pt : series.values) {
    if (pt.m < m_min || pt.m == 0) continue;
    const Real diff = fabsq(series.reference_constant - pt.value);
    if (diff <= static_cast<Real>(kSignTolerance)) continue;
    pts.emplace_back(logq(static_cast<Real>(pt.m)), logq(diff));
  }
  if (pts.size() < 10) {
    throw InsufficientDataError("power-law fit needs at least 10 points with m >= " +
                                std::to_string(m_min) + ", got " + std::to_string(pts.size()));
  }
  const Real n = static_cast<Real>(pts.size());
  Real mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  Real sxx = 0, sxy = 0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) throw InsufficientDataError("power-law fit needs distinct m values");
  const Real slope = sxy / sxx;
  const Real intercept = my - slope * mx;
  Real ss = 0;
  for (const auto& [x, y] : pts) {
    const Real r = y - (intercept + slope * x);
    ss += r * r;
  }
  FitResult fit;
  fit.alpha = static_cast<double>(-slope);
  fit.amplitude = static_cast<double>(expq(intercept));
  fit.residual_rms = static_cast<double>(sqrtq(ss / n));
  fit.m_min = m_min;
  fit.points = pts.size();
  return fit;
}

double gauss_kuzmin_probability(std::size_t j) {
  if (j == 0) throw DomainError("partial quotients start at 1");
  const double x = static_cast<double>(j);
  return std::log1p(1.0 / (x * (x + 2.0))) / std::log(2.0);
}

std::vector<GaussKuzminBin> gauss_kuzmin_histogram(const CFExpansion& cf, std::size_t jmax) {
  const std::size_t n = cf.certified_len();
  if (n < 100) {
    throw DomainError("Gauss-Kuzmin histogram needs at least 100 quotients, got " + std::to_string(n));
  }
  if (jmax == 0) throw DomainError("jmax must be at least 1");
  std::vector<std::size_t> counts(jmax + 2, 0);
  for (const auto& a : cf.quotients) {
    if (cmp(a, static_cast<unsigned long>(jmax)) > 0) {
      ++counts[jmax + 1];
    } else {
      ++counts[a.get_ui()];
    }
  }
  std::vector<GaussKuzminBin> bins;
  bins.reserve(jmax + 1);
  for (std::size_t j = 1; j <= jmax; ++j) {
    const double p = gauss_kuzmin_probability(j);
    bins.push_back({j, counts[j], static_cast<double>(counts[j]) / n, p, false});
  }
  // The cumulative probability telescopes to log2(2(J+1)/(J+2)).
  const double J = static_cast<double>(jmax);
  const double tail_p = std::log2((J + 2.0) / (J + 1.0));
  bins.push_back({jmax + 1, counts[jmax + 1], static_cast<double>(counts[jmax + 1]) / n, tail_p, true});
  return bins;
}

ChiSquareResult gauss_kuzmin_chi_square(std::span<const GaussKuzminBin> bins) {
  if (bins.size() < 2) throw InsufficientDataError("chi-square needs at least two bins");
  std::size_t total = 0;
  for (const auto& b : bins) total += b.count;
  if (total == 0) throw InsufficientDataError("chi-square on an empty histogram");
  ChiSquareResult res;
  for (const auto& b : bins) {
    const double expected = b.expected_freq * static_cast<double>(total);
    const double d = static_cast<double>(b.count) - expected;
    res.statistic += d * d / expected;
  }
  res.dof = bins.size() - 1;
  res.p_value = boost::math::gamma_q(static_cast<double>(res.dof) / 2.0, res.statistic / 2.0);
  return res;
}

}  // namespace khinchin
