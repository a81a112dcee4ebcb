#include "mlplr/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mlplr/likelihood.hpp"
#include "mlplr/parallel.hpp"
#include "mlplr/rng.hpp"

namespace mlplr {

void ExperimentConfig::validate() const {
  spec.validate();
  box.validate();
  fit.validate();
  if (n_grid.empty() || k_grid.empty()) throw std::invalid_argument("experiment: empty grid");
  if (replicates == 0) throw std::invalid_argument("experiment: replicates must be >= 1");
  for (auto n : n_grid)
    if (n < 2) throw std::invalid_argument("experiment: n must be >= 2");
  for (auto k : k_grid)
    if (k < 1) throw std::invalid_argument("experiment: k must be >= 1");
  if (!(spec.sigma2 > 0.0)) throw std::invalid_argument("experiment: sigma2 must be > 0");
}

std::size_t ExperimentConfig::k_max() const {
  return k_grid.empty() ? 0 : *std::max_element(k_grid.begin(), k_grid.end());
}

ExperimentConfig default_desk_experiment() {
  ExperimentConfig c;
  c.spec = default_desk_spec();
  c.box = default_desk_box();
  c.schedule = PenaltySchedule::bic_like(c.spec.input_dim);
  c.n_grid = {500};
  c.k_grid = {c.spec.true_width()};
  c.replicates = 200;
  return c;
}

std::vector<double> ReplicateMatrix::lr_sample(std::size_t n_index, std::size_t k_index) const {
  std::vector<double> out;
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto& c = cell(r, n_index);
    if (!c.failed) out.push_back(c.lr.at(k_index));
  }
  return out;
}

std::vector<std::size_t> ReplicateMatrix::k_hat_sample(std::size_t n_index) const {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < replicates; ++r) {
    const auto& c = cell(r, n_index);
    if (!c.failed) out.push_back(c.k_hat);
  }
  return out;
}

std::size_t ReplicateMatrix::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const ReplicateCell& c) { return c.failed; }));
}

ReplicateMatrix run_replicates(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  ReplicateMatrix m;
  m.n_grid = config.n_grid;
  m.k_grid = config.k_grid;
  m.k_max = config.k_max();
  m.replicates = config.replicates;
  const std::size_t n_cells = config.replicates * config.n_grid.size();
  m.cells.resize(n_cells);
  const std::size_t max_n = *std::max_element(config.n_grid.begin(), config.n_grid.end());

  parallel_for(config.replicates, threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_seed(config.base_seed, r);
    const Dataset full = generate_dataset(config.spec, max_n, rep_seed);
    for (std::size_t ni = 0; ni < config.n_grid.size(); ++ni) {
      ReplicateCell& cell = m.cells[r * config.n_grid.size() + ni];
      cell.replicate = r;
      cell.n = config.n_grid[ni];
      try {
        Dataset data;
        data.d = full.d;
        data.sigma2 = full.sigma2;
        data.x.assign(full.x.begin(), full.x.begin() + static_cast<std::ptrdiff_t>(cell.n * full.d));
        data.y.assign(full.y.begin(), full.y.begin() + static_cast<std::ptrdiff_t>(cell.n));
        FitConfig fit = config.fit;
        fit.seed = derive_seed(rep_seed, 1 + ni);
        if (config.warm_start_truth) fit.warm_starts.push_back(config.spec.theta0);
        const auto profile = profile_lr_curve(data, m.k_max, config.box, fit, 1);
        const double l0 = conditional_loglik(config.spec.theta0, data);
        for (auto k : config.k_grid) {
          const auto& e = profile.at(k - 1);
          cell.lr.push_back(lr_from_logliks(e.sup_loglik, l0));
          cell.converged = cell.converged && e.fit.converged;
        }
        const auto report = select_from_profile(profile, cell.n, config.schedule);
        for (const auto& row : report.per_k) cell.T.push_back(row.T_n);
        cell.k_hat = report.k_hat;
      } catch (const std::exception& ex) {
        cell.failed = true;
        cell.error = ex.what();
        cell.lr.assign(config.k_grid.size(), std::numeric_limits<double>::quiet_NaN());
        cell.T.assign(m.k_max, std::numeric_limits<double>::quiet_NaN());
        cell.k_hat = 0;
      }
    }
  });
  return m;
}

ExperimentSummary summarize_experiment(const ReplicateMatrix& matrix, std::size_t k0,
                                       const std::map<std::size_t, std::vector<double>>& limit_by_k) {
  ExperimentSummary out;
  for (std::size_t ni = 0; ni < matrix.n_grid.size(); ++ni) {
    for (std::size_t ki = 0; ki < matrix.k_grid.size(); ++ki) {
      const auto sample = matrix.lr_sample(ni, ki);
      CellSummary cs;
      cs.n = matrix.n_grid[ni];
      cs.k = matrix.k_grid[ki];
      cs.failures = matrix.replicates - sample.size();
      if (!sample.empty()) {
        auto it = limit_by_k.find(cs.k);
        cs.lr = (it != limit_by_k.end() && !it->second.empty()) ? summarize(sample, it->second)
                                                                  : summarize(sample);
      }
      out.cells.push_back(cs);
    }
    const auto khat = matrix.k_hat_sample(ni);
    if (!khat.empty()) {
      const auto hits = std::count(khat.begin(), khat.end(), k0);
      out.k_hat_frequency[matrix.n_grid[ni]] =
          static_cast<double>(hits) / static_cast<double>(khat.size());
    }
  }
  return out;
}

}  // namespace mlplr
