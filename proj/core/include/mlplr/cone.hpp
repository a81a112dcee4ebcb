#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "mlplr/rng.hpp"
#include "mlplr/score_basis.hpp"

namespace mlplr {

struct NnlsResult {
  Eigen::VectorXd x;
  double value = 0.0;  ///< ||A x||^2, the squared norm of the projection of b
  std::size_t iterations = 0;
};

/// Lawson-Hanson non-negative least squares: min ||A x - b|| over x >= 0.
NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// R with R^T R = sigma, from the symmetric eigendecomposition (negative
/// eigenvalues clamped to zero).
Eigen::MatrixXd whitening_factor(const Eigen::MatrixXd& sigma);

/// Shape of one cone: quadratic rank per true unit and the number of free
/// extra-unit columns.
struct ConeKey {
  std::vector<std::size_t> ranks;
  std::size_t free = 0;
  auto operator<=>(const ConeKey&) const = default;
};

struct ConeSearchOptions {
  std::size_t restarts = 4;  ///< random restarts per new direction (d > 1)
  std::size_t max_sweeps = 50;
  double tol = 1e-12;  ///< relative improvement that ends the sweeps
  std::size_t grid = 64;  ///< angular grid (d = 1)
  std::size_t golden_iters = 40;
};

struct QuadDirection {
  std::size_t block = 0;
  Eigen::VectorXd u;  ///< unit vector in R^{d+1}
};

struct ConeSolution {
  double value = 0.0;
  bool converged = true;
  std::vector<QuadDirection> directions;
  std::vector<std::size_t> extras;  ///< chosen extra-column indices
  Eigen::VectorXd coef;  ///< maximizing coefficient vector on the basis
};

/// Squared projection of one Gaussian draw onto the cones
///   span{linear columns, chosen extras} + {sum_r c_r sg_i (u_r^T xt)^2 phi''_i, c_r >= 0}
/// in the covariance metric. The draw is y (whitened), g = R^T y. Solutions
/// are memoized per key and built from the solutions of the keys just below,
/// so the value is monotone in the key.
class ConeSolver {
 public:
  ConeSolver(const ScoreBasis& basis, const Eigen::MatrixXd& R, Eigen::VectorXd y,
             const ConeSearchOptions& opt, std::uint64_t seed);

  const ConeSolution& solve(const ConeKey& key);
  std::size_t restarts_used() const noexcept { return restarts_used_; }

 private:
  struct Linear;
  struct Eval {
    double value = 0.0;
    Eigen::VectorXd c;
    Eigen::VectorXd resid;
  };

  Linear build_linear(const std::vector<std::size_t>& extras) const;
  Eval evaluate(const Linear& lin, const std::vector<QuadDirection>& dirs) const;
  Eigen::VectorXd quad_column(const Linear& lin, const QuadDirection& q) const;
  Eigen::MatrixXd quad_form(const Linear& lin, std::size_t block, const Eigen::VectorXd& resid) const;

  void add_direction(ConeSolution& s, std::size_t block, Rng& rng);
  void add_extra(ConeSolution& s);
  bool optimize_direction(ConeSolution& s, std::size_t idx, bool fresh, Rng& rng);
  bool optimize_extra(ConeSolution& s, std::size_t idx);
  void finalize(ConeSolution& s) const;

  ScoreBasis basis_;
  Eigen::MatrixXd R_;
  Eigen::VectorXd y_;
  ConeSearchOptions opt_;
  std::uint64_t seed_;
  std::size_t restarts_used_ = 0;
  std::map<ConeKey, ConeSolution> memo_;
};

}  // namespace mlplr
