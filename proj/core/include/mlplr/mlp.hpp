#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mlplr/transfer.hpp"

namespace mlplr {

/// One hidden unit: amplitude `a` and augmented weight vector `w`, where w[0]
/// is the unit bias and w[1..d] multiply the inputs.
struct HiddenUnit {
  double a = 0.0;
  std::vector<double> w;

  bool operator==(const HiddenUnit&) const = default;
};

/// Parameters of a one-hidden-layer MLP with k units on d inputs.
///
/// Flattened layout is (beta, a_1..a_k, w_1[0..d], ..., w_k[0..d]), so the
/// flat dimension is k(d+2)+1.
struct MlpParams {
  double beta = 0.0;
  std::vector<HiddenUnit> units;

  std::size_t hidden() const noexcept { return units.size(); }
  /// d; requires at least one unit.
  std::size_t input_dim() const;
  std::size_t flat_size() const { return flat_size(hidden(), input_dim()); }
  static constexpr std::size_t flat_size(std::size_t k, std::size_t d) noexcept {
    return k * (d + 2) + 1;
  }

  /// Throws std::invalid_argument if k == 0 or the weight lengths disagree.
  void validate() const;

  std::vector<double> flatten() const;
  void flatten_into(std::span<double> out) const;
  static MlpParams unflatten(std::span<const double> flat, std::size_t k, std::size_t d);

  /// Euclidean norm of the flattened vector.
  double norm() const;

  bool operator==(const MlpParams&) const = default;
};

/// Flat-vector index helpers for the layout above.
struct FlatLayout {
  std::size_t k;
  std::size_t d;
  std::size_t beta() const noexcept { return 0; }
  std::size_t amp(std::size_t i) const noexcept { return 1 + i; }
  std::size_t weight(std::size_t i, std::size_t l) const noexcept {
    return 1 + k + i * (d + 1) + l;
  }
  std::size_t size() const noexcept { return k * (d + 2) + 1; }
};

/// w^T (1, x).
double augmented_dot(std::span<const double> w, std::span<const double> x) noexcept;

/// F_theta(x) = beta + sum_i a_i phi(w_i^T (1, x)).
/// Throws std::invalid_argument when x.size() != d.
double mlp_forward(const MlpParams& theta, std::span<const double> x,
                   TransferKind kind = TransferKind::sigmoid);

}  // namespace mlplr
