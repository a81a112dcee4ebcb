#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mlplr/partition.hpp"
#include "mlplr/regression.hpp"
#include "mlplr/rng.hpp"

namespace mlplr {

/// A fitted unit not assigned to any true unit. Its amplitude is expanded
/// around zero; its weights are held fixed.
struct FreeUnit {
  double a = 0.0;
  std::vector<double> w;
};

/// theta split into an identifiable block Phi_t = (beta, w_1..w_{t_k0},
/// s_1..s_k0 [, free amplitudes]) and a nuisance block psi_t = (q_1..q_{t_k0}).
///
/// For true unit i with fitted group G_i, s_i = sum_{G_i} a_j - a_i^0 and
/// q_j = a_j / sum_{G_i} a_j (q_j = 0 when that sum is zero). The fitted
/// amplitudes are recovered as a_j = (s_i + a_i^0) q_j.
struct Reparameterization {
  Partition partition;
  double beta = 0.0;
  std::vector<std::vector<double>> w;  ///< grouped units, t_{k0} vectors of length d+1
  std::vector<double> s;               ///< one per true unit
  std::vector<double> q;               ///< one per grouped unit
  std::vector<FreeUnit> extra;         ///< units t_{k0}+1..k

  /// Phi_t^0 for the given nuisance block: w_j = w_i^0 within group i, s = 0,
  /// beta = beta^0, free amplitudes 0.
  static Reparameterization base_point(const RegressionSpec& spec, const Partition& partition,
                                       std::vector<double> q,
                                       std::vector<std::vector<double>> extra_w = {});
  /// theta -> (Phi_t, psi_t). theta's units are taken in order.
  static Reparameterization from_params(const MlpParams& theta, const RegressionSpec& spec,
                                        const Partition& partition);
  MlpParams to_params(const RegressionSpec& spec) const;
  /// Same nuisance block, identifiable block moved to Phi_t^0.
  Reparameterization at_base(const RegressionSpec& spec) const;

  std::size_t input_dim() const;
  std::size_t phi_dim() const;
  /// Flat Phi_t: beta, w_1[0..d], ..., w_{t_k0}[0..d], s_1..s_k0, free amplitudes.
  std::vector<double> phi() const;
  void set_phi(std::span<const double> values);
  std::vector<std::string> phi_labels() const;

  void validate(const RegressionSpec& spec) const;
};

/// f_theta / f at z = (x, y), evaluated directly from the two Gaussian kernels.
double likelihood_ratio(const Reparameterization& rep, const RegressionSpec& spec,
                        std::span<const double> x, double y);

/// Terms of the second-order expansion of f_theta/f around Phi_t^0 at one z.
struct TaylorTerms {
  double first_order = 0.0;   ///< (Phi - Phi0)^T f'
  double second_order = 0.0;  ///< (Phi - Phi0)^T f'' (Phi - Phi0)
  /// D = ||f_theta/f - 1||_2 under the true law, the scale of the remainder.
  double remainder_norm = 0.0;
};

struct TaylorOptions {
  std::size_t norm_draws = 2048;  ///< Monte-Carlo draws of x for remainder_norm
  std::uint64_t norm_seed = 17;
};

/// first = e(z) * L and second = (e^2 - 1/sigma2) L^2 + e(z) Q, where
///   L = (beta - beta0) + sum_i s_i phi_i + sum_i sum_{G_i} q_j a_i0 phi'_i (w_j - w_i0)^T x
///       [+ sum over free units a_j phi(w_j^T x)]
///   Q = sum_i sum_{G_i} q_j a_i0 phi''_i ((w_j - w_i0)^T x)^2
///       + 2 sum_i s_i sum_{G_i} q_j phi'_i (w_j - w_i0)^T x.
TaylorTerms taylor_terms(const Reparameterization& rep, const RegressionSpec& spec,
                         std::span<const double> x, double y, const TaylorOptions& opt = {});

/// f_theta/f - 1 - first - second/2 at z.
double taylor_remainder(const Reparameterization& rep, const RegressionSpec& spec,
                        std::span<const double> x, double y);

/// D(Phi, psi)^2 = E_x[exp(Delta(x)^2 / sigma2) - 1], Delta = F_theta - F_theta0.
double expansion_scale(const Reparameterization& rep, const RegressionSpec& spec,
                       const TaylorOptions& opt = {});

/// First derivatives of f_theta/f in the Phi_t coordinates at Phi_t^0, one
/// entry per catalog formula. `rep` supplies the partition and psi_t.
Eigen::VectorXd catalog_gradient(const Reparameterization& rep, const RegressionSpec& spec,
                                 std::span<const double> x, double y);
/// Second derivatives at Phi_t^0, assembled block by block from the catalog.
Eigen::MatrixXd catalog_hessian(const Reparameterization& rep, const RegressionSpec& spec,
                                std::span<const double> x, double y);

struct DerivativeCheckReport {
  std::vector<std::string> labels;
  Eigen::VectorXd first_errors;   ///< per-coordinate |analytic - fd| / max(1, |analytic|)
  Eigen::MatrixXd second_errors;  ///< same metric per Hessian entry
  double max_first_error = 0.0;
  double max_second_error = 0.0;
};

/// Central finite differences of f_theta/f in the Phi_t coordinates around the
/// base point of `rep`, compared with catalog_gradient / catalog_hessian.
DerivativeCheckReport fd_check_derivatives(const Reparameterization& rep,
                                           const RegressionSpec& spec, std::span<const double> x,
                                           double y, double step_first = 1e-5,
                                           double step_second = 1e-4);

/// Random base point for fitted width k: uniformly chosen partition,
/// Dirichlet(1) nuisance weights per group, standard normal free-unit weights.
Reparameterization random_base_point(const RegressionSpec& spec, std::size_t k, Rng& rng);

struct GradcheckSummary {
  std::size_t draws = 0;
  double max_first_error = 0.0;
  double max_second_error = 0.0;
};

/// fd_check_derivatives over `draws` random (z, base point) pairs; draw j
/// uses RNG stream (seed, j), z = (x, F_theta0(x) + sigma eps).
GradcheckSummary gradcheck_sweep(const RegressionSpec& spec, std::size_t k, std::size_t draws,
                                 std::uint64_t seed, double step_first = 1e-5,
                                 double step_second = 1e-4);

}  // namespace mlplr
