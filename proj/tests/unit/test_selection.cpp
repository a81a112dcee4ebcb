#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mlplr/estimation.hpp"
#include "mlplr/selection.hpp"

using namespace mlplr;

namespace {

std::vector<ProfileEntry> fake_profile(std::vector<double> lls) {
  std::vector<ProfileEntry> p;
  for (std::size_t i = 0; i < lls.size(); ++i) {
    ProfileEntry e;
    e.k = i + 1;
    e.sup_loglik = lls[i];
    e.fit.loglik = lls[i];
    e.fit.converged = true;
    p.push_back(e);
  }
  return p;
}

}  // namespace

TEST(Penalty, BicExamples) {
  const auto bic = PenaltySchedule::bic_like(1);
  // dim = 4 at d = k = 1, so the value is 2 log n (4 at log n = 2)
  for (std::size_t n : {2u, 7u, 1000u}) {
    EXPECT_NEAR(penalty_value(bic, n, 1) / std::log(static_cast<double>(n)), 2.0, 1e-14);
  }
  EXPECT_NEAR(penalty_value(bic, 100, 2), 3.5 * std::log(100.0), 1e-12);
  EXPECT_NEAR(penalty_value(bic, 100, 2), 16.1181, 5e-5);
  EXPECT_NEAR(penalty_value(bic, 7, 1), 2.0 * std::log(7.0), 1e-12);
  const auto bic3 = PenaltySchedule::bic_like(3);
  EXPECT_NEAR(penalty_value(bic3, 50, 2), 11.0 / 2.0 * std::log(50.0), 1e-12);
}

TEST(Penalty, IncreasingInWidth) {
  for (std::size_t d : {1u, 2u, 5u}) {
    const auto bic = PenaltySchedule::bic_like(d);
    for (std::size_t n : {2u, 10u, 100u, 10000u, 1000000u}) {
      for (std::size_t k = 1; k < 6; ++k) {
        EXPECT_GT(penalty_value(bic, n, k + 1), penalty_value(bic, n, k));
      }
    }
  }
}

TEST(Penalty, CustomTable) {
  PenaltySchedule s{PenaltySchedule::Kind::custom, 1, {1.0, 3.0, 7.0}, 0.5};
  EXPECT_NEAR(penalty_value(s, 10, 2), 3.0 * std::log(10.0) + 0.5, 1e-12);
  EXPECT_THROW(penalty_value(s, 10, 4), std::invalid_argument);
}

TEST(Penalty, RejectsBadArguments) {
  const auto bic = PenaltySchedule::bic_like(1);
  EXPECT_THROW(penalty_value(bic, 1, 1), std::invalid_argument);
  EXPECT_THROW(penalty_value(bic, 10, 0), std::invalid_argument);
}

TEST(Penalty, ScheduleValidation) {
  const auto c = validate_schedule(PenaltySchedule::bic_like(1), 4);
  EXPECT_TRUE(c.increasing);
  EXPECT_TRUE(c.gaps_grow);
  EXPECT_TRUE(c.vanishing_rate);

  PenaltySchedule flat{PenaltySchedule::Kind::custom, 1, {0.0, 0.0, 0.0}, 0.0};
  const auto f = validate_schedule(flat, 3);
  EXPECT_FALSE(f.increasing);
  EXPECT_FALSE(f.gaps_grow);
}

TEST(SelectFromProfile, ReconstructsCriterion) {
  const auto prof = fake_profile({-500.0, -490.0, -488.0});
  const auto bic = PenaltySchedule::bic_like(1);
  const auto rep = select_from_profile(prof, 400, bic);
  ASSERT_EQ(rep.per_k.size(), 3u);
  EXPECT_EQ(rep.n, 400u);
  for (const auto& row : rep.per_k) {
    EXPECT_EQ(row.T_n, row.sup_loglik - row.penalty);
    EXPECT_EQ(row.penalty, penalty_value(bic, 400, row.k));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < 3; ++i) {
    if (rep.per_k[i].T_n > rep.per_k[best].T_n) best = i;
  }
  EXPECT_EQ(rep.k_hat, best + 1);
}

TEST(SelectFromProfile, TiesGoToSmallestWidth) {
  PenaltySchedule zero{PenaltySchedule::Kind::custom, 1, {0.0, 0.0, 0.0}, 0.0};
  EXPECT_EQ(select_from_profile(fake_profile({-3.0, -3.0, -3.0}), 50, zero).k_hat, 1u);
  EXPECT_EQ(select_from_profile(fake_profile({-3.0, -2.0, -2.0}), 50, zero).k_hat, 2u);
}

TEST(SelectFromProfile, ConstantShiftInvariance) {
  Rng rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> lls;
    double acc = -600.0;
    for (int k = 0; k < 4; ++k) lls.push_back(acc += 6.0 * rng.uniform());
    const auto prof = fake_profile(lls);
    PenaltySchedule a{PenaltySchedule::Kind::custom, 1, {2.0, 3.5, 5.0, 6.5}, 0.0};
    auto b = a;
    b.offset = 17.25;
    EXPECT_EQ(select_from_profile(prof, 300, a).k_hat, select_from_profile(prof, 300, b).k_hat);
  }
}

TEST(SelectFromProfile, PropagatesNonConvergence) {
  auto prof = fake_profile({-5.0, -4.0});
  prof[1].fit.converged = false;
  const auto rep = select_from_profile(prof, 20, PenaltySchedule::bic_like(1));
  EXPECT_FALSE(rep.all_converged);
  EXPECT_FALSE(rep.per_k[1].converged);
}

TEST(SelectArchitecture, NoiselessDataPicksTrueWidth) {
  auto spec = default_desk_spec();
  spec.noise_scale = 0.0;
  const auto data = generate_dataset(spec, 300, 3);
  FitConfig cfg;
  cfg.n_starts = 4;
  cfg.seed = 5;
  cfg.grad_tol = 1e-10;
  cfg.warm_starts = {spec.theta0};
  const auto rep = select_architecture(data, 3, default_desk_box(), cfg, PenaltySchedule::bic_like(1));
  EXPECT_EQ(rep.k_hat, 1u);
  for (const auto& row : rep.per_k) EXPECT_NEAR(row.sup_loglik, rep.per_k[0].sup_loglik, 1e-6);
}

TEST(SelectArchitecture, ZeroPenaltyPicksLargestWidth) {
  const auto data = generate_dataset(default_desk_spec(), 300, 9);
  FitConfig cfg;
  cfg.n_starts = 4;
  cfg.seed = 6;
  PenaltySchedule zero{PenaltySchedule::Kind::custom, 1, {0.0, 0.0, 0.0}, 0.0};
  const auto rep = select_architecture(data, 3, default_desk_box(), cfg, zero);
  // On noisy data extra units always buy some likelihood.
  EXPECT_EQ(rep.k_hat, 3u);
  EXPECT_GT(rep.per_k[2].sup_loglik, rep.per_k[0].sup_loglik);
}
