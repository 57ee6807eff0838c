#pragma once

// Khinchin and Levy statistics of continued fractions.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "khinchin/cf.hpp"
#include "khinchin/quad.hpp"

namespace khinchin {

/// Differences below this are "no crossing"; the previous sign is carried.
inline constexpr double kSignTolerance = 1e-20;

struct ConstantEstimate {
  Real value;
  Real error_bound;
};

/// K0 from the defining product: sum of log2(m) ln(1 + 1/(m(m+2))) for
/// m <= terms, plus an Euler-Maclaurin tail. The bound covers the tail
/// remainder and rounding. Requires terms >= 1000; throws AccuracyError when
/// `requested_bound` is below what `terms` can deliver.
ConstantEstimate khinchin_constant(std::size_t terms = 100000,
                                   std::optional<double> requested_bound = std::nullopt);

/// exp(pi^2 / (12 ln 2)).
Real levy_constant();

/// Cached references used by the series (K0 at 10^5 terms, and L0).
const ConstantEstimate& khinchin_reference();
Real levy_reference();

enum class StatKind { Khinchin, Levy };

struct StatPoint {
  std::size_t m;
  Real value;
};

struct StatSeries {
  StatKind kind = StatKind::Khinchin;
  std::vector<StatPoint> values;
  Real reference_constant = 0;

  const StatPoint& back() const { return values.back(); }
};

/// K(m) = exp(sum_{k<=m} ln a_k / m) at m = stride, 2 stride, ... and always
/// at the final index. a0 is excluded. Throws DomainError for an empty
/// expansion or stride 0.
StatSeries khinchin_series(const CFExpansion& cf, std::size_t stride = 1);

/// L(m) = Q_m^(1/m) on the same grid, from precomputed convergents.
StatSeries levy_series(std::span<const Convergent> convergents, std::size_t stride = 1);

/// Same as above but streams the convergent recurrence without storing it.
StatSeries levy_series(const CFExpansion& cf, std::size_t stride = 1);

struct SignChangeRecord {
  std::vector<std::size_t> flip_indices;
  /// (m, flips at indices <= m) for every point of the series.
  std::vector<std::pair<std::size_t, std::size_t>> cumulative;

  std::size_t count() const { return flip_indices.size(); }
};

SignChangeRecord sign_changes(const StatSeries& series);

struct FitResult {
  double alpha = 0;
  double amplitude = 0;
  double residual_rms = 0;
  std::size_t m_min = 0;
  std::size_t points = 0;
};

/// Least squares on (ln m, ln|constant - value|) over m >= m_min; models
/// |constant - value| = amplitude * m^-alpha. Throws InsufficientDataError
/// with fewer than 10 usable points.
FitResult powerlaw_fit(const StatSeries& series, std::size_t m_min = 100);

/// log2(1 + 1/(j(j+2))).
double gauss_kuzmin_probability(std::size_t j);

struct GaussKuzminBin {
  std::size_t j;  ///< jmax + 1 marks the tail bucket a > jmax
  std::size_t count;
  double observed_freq;
  double expected_freq;
  bool tail = false;
};

/// Observed frequencies of a_k = j (j = 1..jmax) plus a tail bucket.
/// Requires certified_len >= 100.
std::vector<GaussKuzminBin> gauss_kuzmin_histogram(const CFExpansion& cf, std::size_t jmax = 20);

struct ChiSquareResult {
  double statistic = 0;
  std::size_t dof = 0;
  double p_value = 0;
};

/// Pearson goodness-of-fit of a histogram against the Gauss-Kuzmin law.
ChiSquareResult gauss_kuzmin_chi_square(std::span<const GaussKuzminBin> bins);

}  // namespace khinchin
