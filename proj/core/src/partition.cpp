#include "mlplr/partition.hpp"

#include <stdexcept>

namespace mlplr {

void Partition::validate(std::size_t k) const {
  if (t.size() < 2) throw std::invalid_argument("Partition: need at least one true unit");
  if (t.front() != 0) throw std::invalid_argument("Partition: t_0 must be 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] <= t[i - 1]) throw std::invalid_argument("Partition: t must be strictly increasing");
  }
  if (t.back() > k) throw std::invalid_argument("Partition: t_{k0} exceeds k");
}

std::size_t Partition::owner(std::size_t j) const {
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (j >= t[i] && j < t[i + 1]) return i;
  }
  throw std::out_of_range("Partition::owner: unit is not assigned to a group");
}

namespace {

void extend(std::vector<std::size_t>& prefix, std::size_t k, std::size_t k0,
            std::vector<Partition>& out) {
  if (prefix.size() == k0 + 1) {
    out.push_back(Partition{prefix});
    return;
  }
  const std::size_t remaining = k0 + 1 - prefix.size();  // entries still to place
  // The next entry must leave room for the remaining strictly increasing ones.
  for (std::size_t v = prefix.back() + 1; v + (remaining - 1) <= k; ++v) {
    prefix.push_back(v);
    extend(prefix, k, k0, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(std::size_t k, std::size_t k0) {
  if (k0 < 1 || k < k0) throw std::invalid_argument("enumerate_partitions: need k >= k0 >= 1");
  std::vector<Partition> out;
  std::vector<std::size_t> prefix{0};
  extend(prefix, k, k0, out);
  return out;
}

}  // namespace mlplr
