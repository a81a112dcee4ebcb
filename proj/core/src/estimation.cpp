#include "mlplr/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mlplr/likelihood.hpp"
#include "mlplr/parallel.hpp"

namespace mlplr {

namespace {

constexpr double kActiveTol = 1e-9;

double norm_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Removes the component of d along `normal` when it points outward (sign > 0
// means outward is +normal).
void drop_outward(std::span<double> d, std::span<const double> normal, double outward_sign) {
  double nn = 0.0, nd = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    nn += normal[i] * normal[i];
    nd += normal[i] * d[i];
  }
  if (nn == 0.0 || nd * outward_sign <= 0.0) return;
  const double c = nd / nn;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= c * normal[i];
}

}  // namespace

MlpBoxSet::MlpBoxSet(std::size_t k, std::size_t d, ConstraintBox box)
    : layout_{k, d}, box_(box) {
  box_.validate();
}

void MlpBoxSet::project(std::span<double> x) const { project_flat(x, layout_.k, layout_.d, box_); }

void MlpBoxSet::restrict_direction(std::span<const double> x, std::span<double> dir) const {
  const double eta_hi = box_.eta * (1.0 + kActiveTol);
  for (std::size_t i = 0; i < layout_.k; ++i) {
    const std::size_t ia = layout_.amp(i);
    const double a = x[ia];
    if (box_.positive_amplitudes) {
      if (a <= eta_hi && dir[ia] < 0.0) dir[ia] = 0.0;
    } else if (std::abs(a) <= eta_hi && a * dir[ia] < 0.0) {
      dir[ia] = 0.0;
    }
    const auto w = x.subspan(layout_.weight(i, 0), layout_.d + 1);
    if (norm_of(w) <= eta_hi) {
      drop_outward(dir.subspan(layout_.weight(i, 0), layout_.d + 1), w, -1.0);
    }
  }
  if (norm_of(x) >= box_.M * (1.0 - kActiveTol)) drop_outward(dir, x, 1.0);
}

void FitConfig::validate() const {
  if (n_starts == 0 && warm_starts.empty()) {
    throw std::invalid_argument("FitConfig: n_starts must be >= 1");
  }
  if (!(grad_tol > 0.0) || !(step_tol > 0.0)) {
    throw std::invalid_argument("FitConfig: tolerances must be > 0");
  }
  if (!(init_scale > 0.0)) throw std::invalid_argument("FitConfig: init_scale must be > 0");
}

MlpParams random_start(const Dataset& data, std::size_t k, const ConstraintBox& box,
                       double init_scale, Rng& rng) {
  MlpParams p;
  p.beta = std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(data.size());
  p.units.resize(k);
  for (auto& u : p.units) {
    u.a = rng.uniform(box.eta, std::max(1.0, box.eta));
    u.w.resize(data.d + 1);
    double nrm = 0.0;
    do {
      for (double& v : u.w) v = rng.normal();
      nrm = norm_of(u.w);
    } while (nrm == 0.0);
    for (double& v : u.w) v *= init_scale / nrm;
  }
  return project_to_box(p, box);
}

MlpParams split_unit_embedding(const MlpParams& theta, const ConstraintBox& box) {
  theta.validate();
  MlpParams out = theta;
  std::size_t best = 0;
  for (std::size_t i = 1; i < theta.hidden(); ++i) {
    if (std::abs(theta.units[i].a) > std::abs(theta.units[best].a)) best = i;
  }
  const double a = theta.units[best].a;
  const double sgn = (a < 0.0) ? -1.0 : 1.0;
  double piece = sgn * box.eta;
  if (std::abs(a) < 2.0 * box.eta) piece = 0.5 * a;
  out.units[best].a = a - piece;
  out.units.push_back(HiddenUnit{piece, theta.units[best].w});
  return out;
}

MlpParams add_unit_embedding(const MlpParams& theta, const ConstraintBox& box, double init_scale,
                             Rng& rng) {
  theta.validate();
  MlpParams out = theta;
  HiddenUnit u;
  u.a = box.eta;
  u.w.resize(theta.input_dim() + 1);
  double nrm = 0.0;
  do {
    for (double& v : u.w) v = rng.normal();
    nrm = norm_of(u.w);
  } while (nrm == 0.0);
  for (double& v : u.w) v *= init_scale / nrm;
  out.units.push_back(std::move(u));
  return out;
}

MlpParams embed_to_width(const MlpParams& theta, std::size_t k, const ConstraintBox& box) {
  if (k < theta.hidden()) throw std::invalid_argument("embed_to_width: target narrower than input");
  MlpParams out = theta;
  while (out.hidden() < k) out = split_unit_embedding(out, box);
  return out;
}

FitResult fit_mle(const Dataset& data, std::size_t k, const ConstraintBox& box,
                  const FitConfig& config, std::size_t threads) {
  data.validate();
  box.validate();
  config.validate();
  if (k == 0) throw std::invalid_argument("fit_mle: k must be >= 1");
  if (!box.consistent_for(k)) throw ProjectionError("fit_mle: box admits no feasible point");

  std::vector<MlpParams> starts;
  std::size_t n_warm = 0;
  for (const auto& ws : config.warm_starts) {
    ws.validate();
    if (ws.input_dim() != data.d) throw std::invalid_argument("fit_mle: warm start has wrong input dimension");
    if (ws.hidden() > k) throw std::invalid_argument("fit_mle: warm start wider than k");
    starts.push_back(project_to_box(embed_to_width(ws, k, box), box));
    ++n_warm;
  }
  for (std::size_t s = 0; s < config.n_starts; ++s) {
    Rng rng(config.seed, n_warm + s);
    starts.push_back(random_start(data, k, box, config.init_scale, rng));
  }

  const MlpBoxSet set(k, data.d, box);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  QuasiNewtonOptions qn;
  qn.max_iters = config.max_iters;
  qn.grad_tol = config.grad_tol;
  qn.step_tol = config.step_tol;
  qn.keep_trace = true;

  std::vector<QuasiNewtonResult> runs(starts.size());
  parallel_for(starts.size(), threads, [&](std::size_t s) {
    ObjectiveFn objective = [&](std::span<const double> x, std::span<double> grad) {
      const auto theta = MlpParams::unflatten(x, k, data.d);
      const double ll = conditional_loglik_with_gradient(theta, data, grad);
      for (double& g : grad) g *= -inv_n;
      return -ll * inv_n;
    };
    runs[s] = minimize_projected_qn(objective, set, starts[s].flatten(), qn);
  });

  FitResult out;
  out.n_starts_used = starts.size();
  std::size_t best = 0;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto theta = MlpParams::unflatten(runs[s].x, k, data.d);
    const double ll = conditional_loglik(theta, data);
    out.per_start_logliks.push_back(ll);
    out.per_start.push_back(StartSummary{ll, runs[s].iterations, runs[s].converged,
                                         runs[s].projected_grad_norm, s < n_warm});
    out.converged = out.converged || runs[s].converged;
    if (ll > out.per_start_logliks[best]) best = s;
  }
  out.theta_hat = MlpParams::unflatten(runs[best].x, k, data.d);
  out.loglik = out.per_start_logliks[best];
  out.best_trace = std::move(runs[best].trace);
  return out;
}

std::vector<ProfileEntry> profile_lr_curve(const Dataset& data, std::size_t k_max,
                                           const ConstraintBox& box, const FitConfig& config,
                                           std::size_t threads) {
  if (k_max == 0) throw std::invalid_argument("profile_lr_curve: k_max must be >= 1");
  std::vector<ProfileEntry> out;
  for (std::size_t k = 1; k <= k_max; ++k) {
    FitConfig cfg = config;
    cfg.warm_starts.clear();
    if (k > 1) {
      const auto& prev = out.back().fit.theta_hat;
      Rng rng(config.seed, 0x9d2c5680ULL + k);
      cfg.warm_starts.push_back(split_unit_embedding(prev, box));
      cfg.warm_starts.push_back(add_unit_embedding(prev, box, config.init_scale, rng));
    }
    for (const auto& ws : config.warm_starts) {
      if (ws.hidden() <= k) cfg.warm_starts.push_back(ws);
    }
    auto fit = fit_mle(data, k, box, cfg, threads);
    out.push_back(ProfileEntry{k, fit.loglik, std::move(fit)});
  }
  return out;
}

}  // namespace mlplr
