#include <gtest/gtest.h>

#include <algorithm>

#include "mlplr/partition.hpp"

using namespace mlplr;

namespace {

std::size_t binomial(std::size_t n, std::size_t r) {
  std::size_t c = 1;
  for (std::size_t i = 1; i <= r; ++i) c = c * (n - r + i) / i;
  return c;
}

}  // namespace

TEST(Partitions, SmallExamples) {
  const auto p21 = enumerate_partitions(2, 1);
  ASSERT_EQ(p21.size(), 2u);
  EXPECT_EQ(p21[0].t, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(p21[1].t, (std::vector<std::size_t>{0, 2}));

  const auto p32 = enumerate_partitions(3, 2);
  ASSERT_EQ(p32.size(), 3u);
  EXPECT_EQ(p32[0].t, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(p32[1].t, (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(p32[2].t, (std::vector<std::size_t>{0, 2, 3}));
}

TEST(Partitions, CountAndOrder) {
  for (std::size_t k = 1; k <= 7; ++k) {
    for (std::size_t k0 = 1; k0 <= k; ++k0) {
      const auto all = enumerate_partitions(k, k0);
      EXPECT_EQ(all.size(), binomial(k, k0)) << k << "," << k0;
      EXPECT_TRUE(std::is_sorted(all.begin(), all.end(),
                                 [](const Partition& a, const Partition& b) { return a.t < b.t; }));
      for (const auto& p : all) {
        EXPECT_NO_THROW(p.validate(k));
        EXPECT_EQ(p.true_width(), k0);
      }
    }
  }
}

TEST(Partitions, GroupAccessors) {
  const Partition p{{0, 2, 3, 5}};
  EXPECT_EQ(p.grouped(), 5u);
  EXPECT_EQ(p.group_size(0), 2u);
  EXPECT_EQ(p.group_size(1), 1u);
  EXPECT_EQ(p.owner(0), 0u);
  EXPECT_EQ(p.owner(1), 0u);
  EXPECT_EQ(p.owner(2), 1u);
  EXPECT_EQ(p.owner(4), 2u);
}

TEST(Partitions, ValidateRejects) {
  EXPECT_THROW((Partition{{1, 2}}).validate(2), std::invalid_argument);
  EXPECT_THROW((Partition{{0, 2, 2}}).validate(3), std::invalid_argument);
  EXPECT_THROW((Partition{{0, 4}}).validate(3), std::invalid_argument);
  EXPECT_THROW(enumerate_partitions(1, 2), std::invalid_argument);
}
