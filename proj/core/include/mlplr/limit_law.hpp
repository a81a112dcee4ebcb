#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlplr/cone.hpp"
#include "mlplr/gram.hpp"
#include "mlplr/partition.hpp"
#include "mlplr/regression.hpp"

namespace mlplr {

/// True iff c_j > 0 exist with sum_j c_j nu_j = 0 (equivalently q_j > 0,
/// sum q_j = 1, sum sqrt(q_j) nu_j = 0). Decided by a phase-one simplex on
/// {c >= 1, N c = 0}. An all-zero list is feasible.
bool delta_feasible(const std::vector<std::vector<double>>& nus, double tol = 1e-9);

/// m vectors nu_j with sum_j nu_j nu_j^T = A and sum_j nu_j = 0, so that
/// equal weights q_j = 1/m witness delta_feasible. Requires A symmetric PSD of
/// rank <= m - 1; throws std::invalid_argument otherwise.
std::vector<std::vector<double>> realize_quadratic_block(const Eigen::MatrixXd& A, std::size_t m,
                                                         double tol = 1e-10);

/// Quadratic rank allowed for a group of m fitted units on d inputs.
inline std::size_t admissible_rank(std::size_t m, std::size_t d) noexcept {
  return m == 0 ? 0 : std::min(m - 1, d + 1);
}

/// Cone shape of partition t at width k.
ConeKey cone_key(const Partition& t, std::size_t k, std::size_t d, bool extended);

/// c / sqrt(c^T sigma c). Throws std::invalid_argument when c^T sigma c <= 0.
Eigen::VectorXd normalize_score(const Eigen::VectorXd& c, const GramMatrix& gram);

/// max(c^T g, 0)^2 / (c^T sigma c) for the Gaussian vector g of basis scores.
double rayleigh_value(const Eigen::VectorXd& c, const Eigen::VectorXd& g, const GramMatrix& gram);

struct LimitOptions {
  ConeSearchOptions search;
  bool extended = false;  ///< add free-unit columns; needs a gram built on an extended basis
  std::size_t threads = 1;
  std::size_t retries = 2;  ///< re-solves with more sweeps and restarts after non-convergence
  /// Positive-definiteness floor for the gram precondition. Looser than the
  /// check_h4 default: the desk spec's smallest eigenvalue is about 2.4e-9.
  double h4_tolerance = 1e-12;
};

struct LimitSample {
  std::vector<double> values;
  std::size_t k = 0;
  std::size_t k0 = 0;
  std::size_t d = 0;
  std::vector<Partition> partitions;         ///< enumeration used for every draw
  std::vector<std::size_t> best_partition;  ///< per draw, index into partitions
  std::vector<std::size_t> restarts;        ///< per draw
  std::vector<bool> converged;              ///< per draw
  std::uint64_t seed = 0;
};

class LimitSimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Draws of sup over the index set of (max(W_S, 0))^2. Draw j uses RNG stream
/// (seed, j) for its standard normal vector, so runs that share a seed share
/// the Gaussian draws across k.
LimitSample simulate_limit(const RegressionSpec& spec, std::size_t k, const GramMatrix& gram,
                           std::size_t n_draws, std::uint64_t seed, const LimitOptions& opt = {});

/// Whitened draw y for stream (seed, draw); g = R^T y has covariance sigma.
Eigen::VectorXd limit_draw(std::size_t dim, std::uint64_t seed, std::size_t draw);

}  // namespace mlplr
