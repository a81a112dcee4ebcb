#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>

#include "mlplr/regression.hpp"
#include "mlplr/score_basis.hpp"

namespace mlplr {

/// Covariance of the limit process on the basis V(z) = e(z) B(x).
struct GramMatrix {
  enum class Mode { monte_carlo, gauss_hermite };
  ScoreBasis basis;
  Eigen::MatrixXd sigma;      ///< E[V V^T] = x_gram / sigma2
  Eigen::MatrixXd x_gram;     ///< E_x[B B^T]
  Eigen::MatrixXd x_gram_se;  ///< Monte Carlo standard error per entry (zero for quadrature)
  std::size_t mc_draws = 0;
  std::uint64_t seed = 0;
  Mode mode = Mode::monte_carlo;
  double sigma2 = 1.0;

  std::size_t basis_dim() const noexcept { return basis.dim(); }
};

/// Monte Carlo estimate over mc_draws inputs x ~ q. Draws come in fixed chunks
/// of 4096 with chunk c on RNG stream (seed, c), summed in chunk order, so the
/// result does not depend on `threads`.
GramMatrix gram_matrix(const RegressionSpec& spec, std::size_t mc_draws, std::uint64_t seed,
                       const ScoreBasis& basis, std::size_t threads = 1);
GramMatrix gram_matrix(const RegressionSpec& spec, std::size_t mc_draws, std::uint64_t seed);

/// Gauss-Hermite quadrature (d = 1 and a normal input law only).
GramMatrix gram_matrix_gauss_hermite(const RegressionSpec& spec, const ScoreBasis& basis,
                                     std::size_t nodes = 129);
GramMatrix gram_matrix_gauss_hermite(const RegressionSpec& spec, std::size_t nodes = 129);

/// Nodes and weights (summing to 1) for E[f(Z)], Z ~ N(0, 1), by Golub-Welsch.
void gauss_hermite_rule(std::size_t nodes, Eigen::VectorXd& x, Eigen::VectorXd& w);

struct H4Report {
  double min_eigenvalue = 0.0;
  bool pass = false;
  /// Smallest eigenvalue after rescaling to unit diagonal (diagnostic only).
  double min_correlation_eigenvalue = 0.0;
};

/// Smallest eigenvalue of the core block of x_gram; pass iff >= tolerance.
H4Report check_h4(const GramMatrix& gram, double tolerance = 1e-8);
/// Same test on an arbitrary symmetric matrix.
H4Report check_h4(const Eigen::MatrixXd& x_gram, double tolerance = 1e-8);

}  // namespace mlplr
