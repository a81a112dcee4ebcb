#pragma once

#include <cstddef>
#include <vector>

#include "mlplr/estimation.hpp"

namespace mlplr {

/// Penalty p_n(k) of the criterion T_n(k) = sup loglik over Theta_k - p_n(k).
struct PenaltySchedule {
  enum class Kind { bic_like, custom };
  Kind kind = Kind::bic_like;
  std::size_t input_dim = 1;  ///< d, for the bic_like dimension count
  /// custom: p_n(k) = table[k-1] * log(n) + offset.
  std::vector<double> table;
  double offset = 0.0;

  static PenaltySchedule bic_like(std::size_t d) { return {Kind::bic_like, d, {}, 0.0}; }
  bool operator==(const PenaltySchedule&) const = default;
};

/// p_n(k). bic_like: (k(d+2)+1)/2 * log n. Throws std::invalid_argument for
/// n < 2, k < 1 or k beyond a custom table.
double penalty_value(const PenaltySchedule& schedule, std::size_t n, std::size_t k);

struct ScheduleCheck {
  bool increasing = true;        ///< p_n(k+1) > p_n(k) at every sampled n
  bool gaps_grow = true;         ///< p_n(k+1) - p_n(k) increasing along the n-grid
  bool vanishing_rate = true;    ///< p_n(k)/n decreasing along the n-grid
};

/// Checks the schedule's growth conditions for k = 1..k_max on n = 1e2, 1e4, 1e6.
/// Only a finite-grid check: asymptotic conditions cannot be certified.
ScheduleCheck validate_schedule(const PenaltySchedule& schedule, std::size_t k_max);

struct SelectionRow {
  std::size_t k = 0;
  double sup_loglik = 0.0;
  double penalty = 0.0;
  double T_n = 0.0;
  bool converged = false;
};

struct SelectionReport {
  std::vector<SelectionRow> per_k;
  std::size_t k_hat = 0;
  std::size_t n = 0;
  bool all_converged = true;
};

/// Penalizes the per-k suprema and returns the argmax, smallest k on ties.
SelectionReport select_from_profile(const std::vector<ProfileEntry>& profile, std::size_t n,
                                    const PenaltySchedule& schedule);

/// profile_lr_curve followed by select_from_profile.
SelectionReport select_architecture(const Dataset& data, std::size_t k_max,
                                    const ConstraintBox& box, const FitConfig& config,
                                    const PenaltySchedule& schedule, std::size_t threads = 1);

}  // namespace mlplr
