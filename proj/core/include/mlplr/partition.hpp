#pragma once

#include <cstddef>
#include <vector>

namespace mlplr {

/// Grouping of fitted units onto true units: t = (t_0, ..., t_{k0}) with
/// 0 = t_0 < t_1 < ... < t_{k0} <= k. Group i (1-based) holds the fitted units
/// t_{i-1}+1 .. t_i; units after t_{k0} are unassigned.
struct Partition {
  std::vector<std::size_t> t;

  /// Throws std::invalid_argument unless t is a valid partition for width k.
  void validate(std::size_t k) const;

  std::size_t true_width() const noexcept { return t.empty() ? 0 : t.size() - 1; }
  /// t_{k0}: number of fitted units assigned to some true unit.
  std::size_t grouped() const noexcept { return t.empty() ? 0 : t.back(); }
  /// m_i for 0-based true unit i.
  std::size_t group_size(std::size_t i) const { return t.at(i + 1) - t.at(i); }
  /// 0-based fitted-unit index range [begin, end) of 0-based true unit i.
  std::size_t group_begin(std::size_t i) const { return t.at(i); }
  std::size_t group_end(std::size_t i) const { return t.at(i + 1); }
  /// 0-based true unit owning 0-based fitted unit j (j < grouped()).
  std::size_t owner(std::size_t j) const;

  bool operator==(const Partition&) const = default;
};

/// Every valid t for (k, k0), lexicographic in t. Requires k >= k0 >= 1.
std::vector<Partition> enumerate_partitions(std::size_t k, std::size_t k0);

}  // namespace mlplr
