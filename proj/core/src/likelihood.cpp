#include "mlplr/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace mlplr {

namespace {

void check_compatible(const MlpParams& theta, const Dataset& data) {
  data.validate();
  if (theta.input_dim() != data.d) {
    throw std::invalid_argument("loglik: parameter input dimension does not match data");
  }
  if (!(data.sigma2 > 0.0)) throw std::invalid_argument("loglik: data.sigma2 must be > 0");
}

double gaussian_constant(std::size_t n, double sigma2) {
  return -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi * sigma2);
}

}  // namespace

double conditional_loglik(const MlpParams& theta, const Dataset& data) {
  check_compatible(theta, data);
  double sse = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = data.y[i] - mlp_forward(theta, data.row(i));
    sse += r * r;
  }
  return gaussian_constant(data.size(), data.sigma2) - 0.5 * sse / data.sigma2;
}

double conditional_loglik_with_gradient(const MlpParams& theta, const Dataset& data,
                                        std::span<double> grad) {
  check_compatible(theta, data);
  const FlatLayout lay{theta.hidden(), data.d};
  if (grad.size() != lay.size()) throw std::invalid_argument("loglik gradient: wrong size");
  std::fill(grad.begin(), grad.end(), 0.0);

  const std::size_t k = lay.k;
  std::vector<double> act(k), dact(k);
  double sse = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto x = data.row(i);
    double f = theta.beta;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& u = theta.units[j];
      const double t = augmented_dot(u.w, x);
      const double p = sigmoid(t);
      act[j] = p;
      dact[j] = p * sigmoid(-t);
      f += u.a * p;
    }
    const double r = data.y[i] - f;
    sse += r * r;
    // d/dtheta of -(r^2)/(2 sigma2) is r/sigma2 * dF/dtheta; the 1/sigma2 is
    // applied once at the end.
    grad[lay.beta()] += r;
    for (std::size_t j = 0; j < k; ++j) {
      grad[lay.amp(j)] += r * act[j];
      const double c = r * theta.units[j].a * dact[j];
      grad[lay.weight(j, 0)] += c;
      for (std::size_t l = 0; l < data.d; ++l) grad[lay.weight(j, l + 1)] += c * x[l];
    }
  }
  for (double& g : grad) g /= data.sigma2;
  return gaussian_constant(data.size(), data.sigma2) - 0.5 * sse / data.sigma2;
}

double residual_score(const RegressionSpec& spec, std::span<const double> x, double y) {
  if (!(spec.sigma2 > 0.0)) throw std::invalid_argument("residual_score: sigma2 must be > 0");
  return (y - mlp_forward(spec.theta0, x)) / spec.sigma2;
}

double lr_from_logliks(double sup_loglik, double loglik_at_truth, double tolerance) {
  const double v = 2.0 * (sup_loglik - loglik_at_truth);
  if (!std::isfinite(v)) throw LrStatisticError("lr_statistic: non-finite log-likelihood");
  if (sup_loglik - loglik_at_truth < -tolerance) {
    throw LrStatisticError("lr_statistic: supremum below the true-parameter log-likelihood by " +
                           std::to_string(-0.5 * v) + " (optimizer failure)");
  }
  return v;
}

double lr_statistic(double sup_loglik, const RegressionSpec& spec, const Dataset& data,
                    double tolerance) {
  return lr_from_logliks(sup_loglik, conditional_loglik(spec.theta0, data), tolerance);
}

}  // namespace mlplr
