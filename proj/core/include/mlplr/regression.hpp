#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mlplr/constraints.hpp"
#include "mlplr/mlp.hpp"
#include "mlplr/rng.hpp"

namespace mlplr {

/// Law q of the inputs X. Both kinds have a positive density on R^d and
/// finite moments of every order.
struct InputLaw {
  enum class Kind { standard_normal, normal };
  Kind kind = Kind::standard_normal;
  double scale = 1.0;  ///< per-coordinate standard deviation for Kind::normal

  void sample(Rng& rng, std::span<double> out) const;
  double stddev() const noexcept { return kind == Kind::normal ? scale : 1.0; }
  std::string name() const;
  static InputLaw from_name(const std::string& name, double scale = 1.0);

  bool operator==(const InputLaw&) const = default;
};

/// The true model Y = F_{theta0}(X) + eps, eps ~ N(0, sigma2), X ~ q.
struct RegressionSpec {
  MlpParams theta0;
  double sigma2 = 1.0;
  std::size_t input_dim = 1;
  InputLaw input_law;
  /// Multiplies the simulated noise draw; 0 gives noiseless responses while
  /// sigma2 remains the variance used by the likelihood.
  double noise_scale = 1.0;

  std::size_t true_width() const noexcept { return theta0.hidden(); }

  /// Structural checks: theta0 well formed with the declared input_dim,
  /// sigma2 >= 0, noise_scale >= 0.
  void validate() const;
  /// True when no two true weight vectors coincide (weak identifiability).
  bool distinct_true_weights(double tol = 1e-12) const;
  /// theta0 strictly inside box (every slack > 0).
  bool interior_to(const ConstraintBox& box) const;

  bool operator==(const RegressionSpec&) const = default;
};

/// d=1, k0=1, theta0 = (beta=0.5, a=1, w=(0.5, 1)), sigma2=1, q standard normal.
RegressionSpec default_desk_spec();
/// eta=0.1, M=50, positive amplitudes.
ConstraintBox default_desk_box();

/// n i.i.d. pairs; x stored row-major (n x d).
struct Dataset {
  std::size_t d = 0;
  std::vector<double> x;
  std::vector<double> y;
  double sigma2 = 1.0;

  std::size_t size() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const noexcept {
    return {x.data() + i * d, d};
  }
  /// Throws std::invalid_argument if n == 0 or row lengths are inconsistent.
  void validate() const;
};

/// Deterministic in (spec, n, seed). Row i uses RNG stream (seed, i) so any
/// prefix of a larger dataset with the same seed is identical.
Dataset generate_dataset(const RegressionSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace mlplr
