#include "mlplr/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlplr {

double ks_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size()), nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] <= x) ++i;
    while (j < sb.size() && sb[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

namespace {

double sorted_quantile(const std::vector<double>& s, double prob) {
  const double h = (static_cast<double>(s.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

}  // namespace

double quantile_type7(std::span<const double> sample, double prob) {
  if (sample.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("quantile: prob outside [0, 1]");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  return sorted_quantile(s, prob);
}

SummaryStats summarize(std::span<const double> sample) {
  if (sample.empty()) throw std::invalid_argument("summarize: empty sample");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  SummaryStats out;
  out.count = s.size();
  for (std::size_t q = 0; q < SummaryStats::probs.size(); ++q) {
    out.quantiles[q] = sorted_quantile(s, SummaryStats::probs[q]);
  }
  double sum = 0.0;
  for (double v : sample) sum += v;
  out.mean = sum / static_cast<double>(s.size());
  if (s.size() > 1) {
    double ss = 0.0;
    for (double v : sample) ss += (v - out.mean) * (v - out.mean);
    out.variance = ss / static_cast<double>(s.size() - 1);
  }
  return out;
}

SummaryStats summarize(std::span<const double> sample, std::span<const double> reference) {
  SummaryStats out = summarize(sample);
  out.ks = ks_distance(sample, reference);
  return out;
}

}  // namespace mlplr
