#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlplr/mlp.hpp"

namespace mlplr {

/// The compact parameter set: ||w_i|| >= eta, a_i >= eta (or |a_i| >= eta when
/// positive_amplitudes is off) and ||theta|| <= M.
struct ConstraintBox {
  double eta = 0.1;
  double M = 50.0;
  bool positive_amplitudes = true;

  /// Throws std::invalid_argument unless 0 < eta < M.
  void validate() const;
  /// True when a feasible point with k units exists (2 k eta^2 <= M^2).
  bool consistent_for(std::size_t k) const noexcept;

  bool operator==(const ConstraintBox&) const = default;
};

struct FeasibilityReport {
  bool feasible = false;
  std::vector<double> weight_slack;     ///< ||w_i|| - eta
  std::vector<double> amplitude_slack;  ///< a_i - eta, or |a_i| - eta
  double norm_slack = 0.0;              ///< M - ||theta||

  double min_slack() const noexcept;
};

FeasibilityReport check_constraints(const MlpParams& theta, const ConstraintBox& box);

class ProjectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps theta onto a feasible point: radial push-out of short weight vectors
/// (w_i = 0 goes to eta * e_0), amplitude clamp, then a global rescale when
/// ||theta|| > M followed by one re-application of the per-unit bounds.
/// Idempotent on feasible input. Throws ProjectionError when no feasible point
/// exists for this k.
MlpParams project_to_box(const MlpParams& theta, const ConstraintBox& box);

/// In-place projection of a flat parameter vector (layout of MlpParams::flatten).
void project_flat(std::span<double> flat, std::size_t k, std::size_t d, const ConstraintBox& box);

}  // namespace mlplr
