#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>

namespace mlplr {

/// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
/// Throws std::invalid_argument on an empty sample.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile_type7(std::span<const double> sample, double prob);

struct SummaryStats {
  static constexpr std::array<double, 5> probs{0.05, 0.25, 0.5, 0.75, 0.95};
  std::array<double, 5> quantiles{};
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased; 0 for a single value
  std::size_t count = 0;
  std::optional<double> ks;  ///< against a reference sample, when given
};

SummaryStats summarize(std::span<const double> sample);
SummaryStats summarize(std::span<const double> sample, std::span<const double> reference);

}  // namespace mlplr
