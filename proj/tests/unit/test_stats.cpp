#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mlplr/rng.hpp"
#include "mlplr/stats.hpp"
#include "oracles.hpp"

using namespace mlplr;

TEST(KsDistance, Examples) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  EXPECT_EQ(ks_distance(a, a), 0.0);
  EXPECT_EQ(ks_distance(a, std::vector<double>{10.0, 11.0}), 1.0);
  EXPECT_NEAR(ks_distance(a, std::vector<double>{2.0, 3.0, 4.0}), 1.0 / 3.0, 1e-15);
  EXPECT_THROW(ks_distance(a, std::vector<double>{}), std::invalid_argument);
}

TEST(KsDistance, MatchesBruteForce) {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(1 + rep % 17), b(1 + rep % 11);
    for (double& v : a) v = std::round(4.0 * rng.normal()) / 2.0;  // ties on purpose
    for (double& v : b) v = std::round(4.0 * rng.normal() + 1.0) / 2.0;
    EXPECT_NEAR(ks_distance(a, b), oracle::ks_brute(a, b), 1e-15);
    EXPECT_EQ(ks_distance(a, b), ks_distance(b, a));
  }
}

TEST(Quantile, TypeSevenExamples) {
  const std::vector<double> s{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(quantile_type7(s, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(quantile_type7(s, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(quantile_type7(s, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_type7(s, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_type7(std::vector<double>{7.0}, 0.3), 7.0);
  EXPECT_THROW(quantile_type7(s, 1.5), std::invalid_argument);
}

TEST(Summarize, Basics) {
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0, 5.0};
  const auto r = summarize(s);
  EXPECT_EQ(r.count, 5u);
  EXPECT_DOUBLE_EQ(r.mean, 3.0);
  EXPECT_DOUBLE_EQ(r.variance, 2.5);
  EXPECT_DOUBLE_EQ(r.quantiles[2], 3.0);
  EXPECT_DOUBLE_EQ(r.quantiles[0], 1.2);
  EXPECT_FALSE(r.ks.has_value());
  EXPECT_EQ(summarize(std::vector<double>{2.0}).variance, 0.0);
  const auto w = summarize(s, std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0});
  ASSERT_TRUE(w.ks.has_value());
  EXPECT_EQ(*w.ks, 0.0);
}

TEST(Summarize, ConstantAndIntegerSamples) {
  const auto c = summarize(std::vector<double>{1.0, 1.0, 1.0});
  for (double q : c.quantiles) EXPECT_EQ(q, 1.0);
  EXPECT_EQ(c.variance, 0.0);
  std::vector<double> ints(101);
  for (int i = 0; i <= 100; ++i) ints[i] = i;
  const auto r = summarize(ints);
  EXPECT_EQ(r.quantiles[2], 50.0);
  EXPECT_EQ(r.quantiles[0], 5.0);
  EXPECT_EQ(r.quantiles[4], 95.0);
}

TEST(Summarize, TenThousandNormals) {
  Rng rng(2024);
  std::vector<double> s(10000);
  for (double& v : s) v = rng.normal();
  const auto r = summarize(s);
  EXPECT_NEAR(r.mean, 0.0, 0.03);
  EXPECT_NEAR(r.variance, 1.0, 0.05);
  for (std::size_t i = 1; i < r.quantiles.size(); ++i) EXPECT_LE(r.quantiles[i - 1], r.quantiles[i]);
}

TEST(Summarize, NormalSample) {
  Rng rng(1);
  std::vector<double> s(100000);
  for (double& v : s) v = rng.normal();
  const auto r = summarize(s);
  EXPECT_NEAR(r.mean, 0.0, 0.02);
  EXPECT_NEAR(r.variance, 1.0, 0.02);
  EXPECT_NEAR(r.quantiles[4], 1.6449, 0.03);
  EXPECT_NEAR(r.quantiles[1], -0.6745, 0.02);
}
