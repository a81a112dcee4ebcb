#pragma once

#include <span>
#include <stdexcept>

#include "mlplr/mlp.hpp"
#include "mlplr/regression.hpp"

namespace mlplr {

/// Gaussian conditional log-likelihood
///   -(n/2) log(2 pi sigma2) - (1/(2 sigma2)) sum_i (y_i - F_theta(x_i))^2.
/// The sum of log q(x_i) is omitted: it does not depend on theta.
double conditional_loglik(const MlpParams& theta, const Dataset& data);

/// Same value, plus the gradient with respect to the flattened parameters
/// (layout of MlpParams::flatten) written into `grad`.
double conditional_loglik_with_gradient(const MlpParams& theta, const Dataset& data,
                                        std::span<double> grad);

/// e(z) = (y - F_{theta0}(x)) / sigma2.
double residual_score(const RegressionSpec& spec, std::span<const double> x, double y);

class LrStatisticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 2 (sup_loglik - loglik_at_truth). Throws LrStatisticError when sup_loglik
/// falls short of loglik_at_truth by more than `tolerance` (the supremum was
/// not found upstream); shortfalls within tolerance are returned unchanged.
double lr_from_logliks(double sup_loglik, double loglik_at_truth, double tolerance = 1e-6);

/// 2 lambda_n^k for a dataset generated by `spec`.
double lr_statistic(double sup_loglik, const RegressionSpec& spec, const Dataset& data,
                    double tolerance = 1e-6);

}  // namespace mlplr
