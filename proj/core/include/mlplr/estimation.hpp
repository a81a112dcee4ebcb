#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mlplr/constraints.hpp"
#include "mlplr/optimizer.hpp"
#include "mlplr/regression.hpp"

namespace mlplr {

/// The constraint set Theta_k as a FeasibleSet over flat parameter vectors.
class MlpBoxSet final : public FeasibleSet {
 public:
  MlpBoxSet(std::size_t k, std::size_t d, ConstraintBox box);
  void project(std::span<double> x) const override;
  void restrict_direction(std::span<const double> x, std::span<double> direction) const override;

 private:
  FlatLayout layout_;
  ConstraintBox box_;
};

struct FitConfig {
  std::size_t n_starts = 20;  ///< random starts, run after any warm starts
  std::size_t max_iters = 1000;
  double grad_tol = 1e-6;  ///< on the per-observation objective -loglik/n
  double step_tol = 1e-12;
  std::uint64_t seed = 0;
  double init_scale = 1.0;  ///< norm of random initial weight vectors
  std::vector<MlpParams> warm_starts;

  /// Throws std::invalid_argument on non-positive tolerances or n_starts == 0
  /// with no warm starts.
  void validate() const;
};

struct StartSummary {
  double loglik = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double projected_grad_norm = 0.0;
  bool warm = false;
};

struct FitResult {
  MlpParams theta_hat;
  double loglik = 0.0;
  bool converged = false;  ///< some start met grad_tol within max_iters
  std::size_t n_starts_used = 0;
  std::vector<double> per_start_logliks;
  std::vector<StartSummary> per_start;
  std::vector<double> best_trace;  ///< -loglik/n after each accepted iteration of the best start
};

/// Constrained MLE over Theta_k by multi-start projected quasi-Newton. Start s
/// draws from RNG stream (seed, s); the best log-likelihood wins, lowest start
/// index on ties. Warm starts come first; those with fewer than k units are
/// widened by embed_to_width.
FitResult fit_mle(const Dataset& data, std::size_t k, const ConstraintBox& box,
                  const FitConfig& config, std::size_t threads = 1);

/// Random start: beta = mean(y), a ~ U[eta, 1], weights uniform on the sphere
/// of radius init_scale; projected onto the box.
MlpParams random_start(const Dataset& data, std::size_t k, const ConstraintBox& box,
                       double init_scale, Rng& rng);

/// Width k+1 with the same regression function: the largest-amplitude unit is
/// split into amplitudes (a - eta, eta) sharing its weights.
MlpParams split_unit_embedding(const MlpParams& theta, const ConstraintBox& box);

/// Width k+1: adds a unit of amplitude eta and a random direction of norm
/// init_scale (changes the regression function by at most eta).
MlpParams add_unit_embedding(const MlpParams& theta, const ConstraintBox& box, double init_scale,
                             Rng& rng);

/// theta repeatedly split until it has k units (k >= theta.hidden()).
MlpParams embed_to_width(const MlpParams& theta, std::size_t k, const ConstraintBox& box);

struct ProfileEntry {
  std::size_t k = 0;
  double sup_loglik = 0.0;
  FitResult fit;
};

/// fit_mle for k = 1..k_max. Width k > 1 is warm-started from the best
/// (k-1)-unit fit via split_unit_embedding and add_unit_embedding, plus any
/// config warm starts with at most k units. Every width uses config.seed.
std::vector<ProfileEntry> profile_lr_curve(const Dataset& data, std::size_t k_max,
                                           const ConstraintBox& box, const FitConfig& config,
                                           std::size_t threads = 1);

}  // namespace mlplr
