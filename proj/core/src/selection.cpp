#include "mlplr/selection.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace mlplr {

double penalty_value(const PenaltySchedule& schedule, std::size_t n, std::size_t k) {
  if (n < 2) throw std::invalid_argument("penalty_value: n must be >= 2");
  if (k < 1) throw std::invalid_argument("penalty_value: k must be >= 1");
  const double log_n = std::log(static_cast<double>(n));
  switch (schedule.kind) {
    case PenaltySchedule::Kind::bic_like: {
      const double dim = static_cast<double>(k * (schedule.input_dim + 2) + 1);
      return 0.5 * dim * log_n;
    }
    case PenaltySchedule::Kind::custom:
      if (k > schedule.table.size()) {
        throw std::invalid_argument("penalty_value: k beyond the custom table");
      }
      return schedule.table[k - 1] * log_n + schedule.offset;
  }
  throw std::invalid_argument("penalty_value: unknown schedule kind");
}

ScheduleCheck validate_schedule(const PenaltySchedule& schedule, std::size_t k_max) {
  constexpr std::array<std::size_t, 3> grid{100, 10'000, 1'000'000};
  ScheduleCheck out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    double prev_rate = INFINITY;
    double prev_gap = -INFINITY;
    for (std::size_t n : grid) {
      const double p = penalty_value(schedule, n, k);
      const double rate = p / static_cast<double>(n);
      if (!(rate < prev_rate)) out.vanishing_rate = false;
      prev_rate = rate;
      if (k < k_max) {
        const double gap = penalty_value(schedule, n, k + 1) - p;
        if (!(gap > 0.0)) out.increasing = false;
        if (!(gap > prev_gap)) out.gaps_grow = false;
        prev_gap = gap;
      }
    }
  }
  return out;
}

SelectionReport select_from_profile(const std::vector<ProfileEntry>& profile, std::size_t n,
                                    const PenaltySchedule& schedule) {
  if (profile.empty()) throw std::invalid_argument("select_from_profile: empty profile");
  SelectionReport rep;
  rep.n = n;
  double best = -INFINITY;
  for (const auto& e : profile) {
    SelectionRow row;
    row.k = e.k;
    row.sup_loglik = e.sup_loglik;
    row.penalty = penalty_value(schedule, n, e.k);
    row.T_n = row.sup_loglik - row.penalty;
    row.converged = e.fit.converged;
    rep.all_converged = rep.all_converged && row.converged;
    if (row.T_n > best) {
      best = row.T_n;
      rep.k_hat = row.k;
    }
    rep.per_k.push_back(row);
  }
  return rep;
}

SelectionReport select_architecture(const Dataset& data, std::size_t k_max,
                                    const ConstraintBox& box, const FitConfig& config,
                                    const PenaltySchedule& schedule, std::size_t threads) {
  if (data.size() < 2) throw std::invalid_argument("select_architecture: need n >= 2");
  const auto profile = profile_lr_curve(data, k_max, box, config, threads);
  return select_from_profile(profile, data.size(), schedule);
}

}  // namespace mlplr
