#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mlplr/estimation.hpp"
#include "mlplr/selection.hpp"
#include "mlplr/stats.hpp"

namespace mlplr {

struct ExperimentConfig {
  RegressionSpec spec;
  ConstraintBox box;
  FitConfig fit;
  PenaltySchedule schedule;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> k_grid;
  std::size_t replicates = 1;
  std::uint64_t base_seed = 0;
  std::size_t limit_draws = 10000;
  /// Seed theta0 (widened to each k) as a warm start, so every sup is at
  /// least the log-likelihood at the truth.
  bool warm_start_truth = true;

  /// Throws std::invalid_argument on empty grids, replicates == 0, k < 1 or
  /// n < 2 in the grids, or an invalid spec/box.
  void validate() const;
  std::size_t k_max() const;
};

/// Desk configuration: default spec and box, BIC-like schedule, n = 500,
/// k = k0, 200 replicates.
ExperimentConfig default_desk_experiment();

struct ReplicateCell {
  std::size_t replicate = 0;
  std::size_t n = 0;
  std::vector<double> lr;  ///< 2 lambda at each k of k_grid (NaN when the cell failed)
  std::vector<double> T;   ///< T_n(k) for k = 1..k_max
  std::size_t k_hat = 0;
  bool converged = true;
  bool failed = false;
  std::string error;
};

struct ReplicateMatrix {
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> k_grid;
  std::size_t k_max = 0;
  std::size_t replicates = 0;
  std::vector<ReplicateCell> cells;  ///< replicate-major, then n_grid order

  const ReplicateCell& cell(std::size_t replicate, std::size_t n_index) const {
    return cells.at(replicate * n_grid.size() + n_index);
  }
  /// 2 lambda over replicates for grid entries (n_index, k_index); failed cells skipped.
  std::vector<double> lr_sample(std::size_t n_index, std::size_t k_index) const;
  std::vector<std::size_t> k_hat_sample(std::size_t n_index) const;
  std::size_t failures() const;
};

/// Replicate r draws its data from seed stream (base_seed, r); the datasets
/// of one replicate are prefixes of each other across n. Each cell runs
/// profile_lr_curve to max(k_grid), then 2 lambda and T_n. Cell failures are
/// recorded, never thrown.
ReplicateMatrix run_replicates(const ExperimentConfig& config, std::size_t threads = 1);

struct CellSummary {
  std::size_t n = 0;
  std::size_t k = 0;
  SummaryStats lr;
  std::size_t failures = 0;
};

struct ExperimentSummary {
  std::vector<CellSummary> cells;
  /// Frequency of k_hat == k0 per n.
  std::map<std::size_t, double> k_hat_frequency;
};

/// limit_by_k maps k to a simulated limit sample used as the KS reference.
ExperimentSummary summarize_experiment(const ReplicateMatrix& matrix, std::size_t k0,
                                       const std::map<std::size_t, std::vector<double>>& limit_by_k);

}  // namespace mlplr
