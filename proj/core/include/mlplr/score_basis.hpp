#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlplr/constraints.hpp"
#include "mlplr/regression.hpp"

namespace mlplr {

/// x-part B(x) of the limit score V(z) = e(z) B(x), at the true weights.
///
/// Ordering: [1], [phi_i], [xt_l phi'_i] (i major, l = 0..d),
/// [xt_l xt_m phi''_i] (i major, 0 <= l <= m <= d), then optional extra
/// columns phi(w_g^T xt) for the extended index set. xt = (1, x).
struct ScoreBasis {
  std::size_t k0 = 0;
  std::size_t d = 0;
  std::vector<std::vector<double>> true_weights;
  std::vector<double> true_amplitudes;
  std::vector<std::vector<double>> extra_weights;

  static ScoreBasis from_spec(const RegressionSpec& spec,
                              std::vector<std::vector<double>> extra_weights = {});

  std::size_t core_dim() const noexcept {
    return 1 + k0 + k0 * (d + 1) + k0 * (d + 1) * (d + 2) / 2;
  }
  std::size_t dim() const noexcept { return core_dim() + extra_weights.size(); }
  std::size_t linear_dim() const noexcept { return 1 + k0 + k0 * (d + 1); }
  std::size_t quad_block() const noexcept { return (d + 1) * (d + 2) / 2; }

  std::size_t constant() const noexcept { return 0; }
  std::size_t phi(std::size_t i) const noexcept { return 1 + i; }
  std::size_t lin(std::size_t i, std::size_t l) const noexcept {
    return 1 + k0 + i * (d + 1) + l;
  }
  /// Position of xt_l xt_m phi''_i; the pair is unordered.
  std::size_t quad(std::size_t i, std::size_t l, std::size_t m) const noexcept;
  std::size_t extra(std::size_t g) const noexcept { return core_dim() + g; }

  /// sg(a_i^0): +1 or -1.
  double sign(std::size_t i) const noexcept { return true_amplitudes[i] < 0.0 ? -1.0 : 1.0; }

  void eval(std::span<const double> x, std::span<double> out) const;
};

/// B(x) at the RegressionSpec's true parameters (core columns only).
std::vector<double> eval_score_basis(const RegressionSpec& spec, std::span<const double> x);

/// Weight grid for the extended index set: radii {0.5, 1, 2, 4, 8} inside the
/// box times a fixed set of directions with a non-zero input part. Points
/// within 1e-3 of a true weight are dropped.
std::vector<std::vector<double>> extended_weight_grid(const RegressionSpec& spec,
                                                      const ConstraintBox& box);

}  // namespace mlplr
