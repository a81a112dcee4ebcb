// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "mlplr/estimation.hpp"
#include "mlplr/experiment.hpp"
#include "mlplr/gram.hpp"
#include "mlplr/limit_law.hpp"
#include "mlplr/partition.hpp"
#include "mlplr/reparam.hpp"
#include "mlplr/stats.hpp"

using namespace mlplr;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Shared between criteria: the k = k0 limit sample and the gram it was built on.
const GramMatrix& desk_gram() {
  static const GramMatrix g = gram_matrix(default_desk_spec(), 200000, derive_seed(2024, 0x6a09e667ULL),
                                          ScoreBasis::from_spec(default_desk_spec()), threads());
  return g;
}

const LimitSample& limit_sample(std::size_t k) {
  static std::map<std::size_t, LimitSample> cache;
  auto it = cache.find(k);
  if (it == cache.end()) {
    LimitOptions opt;
    opt.threads = threads();
    it = cache.emplace(k, simulate_limit(default_desk_spec(), k, desk_gram(), 10000, 31337, opt)).first;
  }
  return it->second;
}

const ReplicateMatrix& overparam_matrix() {
  static const ReplicateMatrix m = [] {
    auto c = default_desk_experiment();
    c.n_grid = {200, 500, 1000};
    c.k_grid = {2};
    c.replicates = 100;
    c.base_seed = 6006;
    return run_replicates(c, threads());
  }();
  return m;
}

Outcome derivative_catalog() {
  const auto r = gradcheck_sweep(default_desk_spec(), 3, 100, 101, 1e-5, 1e-4);
  return {r.max_first_error <= 1e-5 && r.max_second_error <= 1e-4,
          fmt("max first-order error %.3g (<= 1e-5), max second-order error %.3g (<= 1e-4)",
              r.max_first_error, r.max_second_error)};
}

Outcome expansion_order() {
  const auto spec = default_desk_spec();
  struct Case {
    Reparameterization base;
    std::vector<double> dir;
    std::vector<double> x;
    double y;
  };
  std::vector<Case> cases;
  for (std::size_t j = 0; j < 200; ++j) {
    Rng rng(202, j);
    Case c;
    c.x.resize(1);
    spec.input_law.sample(rng, c.x);
    c.y = mlp_forward(spec.theta0, c.x) + rng.normal();
    c.base = random_base_point(spec, 2, rng);
    c.dir.resize(c.base.phi_dim());
    for (double& v : c.dir) v = rng.normal();
    cases.push_back(std::move(c));
  }
  const std::vector<double> scales{1e-2, 5e-3, 2.5e-3};
  std::vector<double> avg;
  for (double h : scales) {
    double s = 0.0;
    for (const auto& c : cases) {
      auto rep = c.base;
      auto phi = rep.phi();
      for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += h * c.dir[i];
      rep.set_phi(phi);
      s += std::abs(taylor_remainder(rep, spec, c.x, c.y));
    }
    avg.push_back(s / static_cast<double>(cases.size()));
  }
  const double r1 = avg[0] / avg[1], r2 = avg[1] / avg[2];
  const bool ok = r1 >= 6.0 && r1 <= 10.0 && r2 >= 6.0 && r2 <= 10.0;
  return {ok, fmt("remainder ratios %.3f, %.3f (each in [6, 10])", r1, r2)};
}

Outcome h4_certificate() {
  const auto spec = default_desk_spec();
  const auto gh = check_h4(gram_matrix_gauss_hermite(spec), 1e-8);
  const auto mc = check_h4(gram_matrix(spec, 200000, 303), 1e-8);
  const bool agree = gh.pass == mc.pass;
  return {gh.pass && mc.pass && agree,
          fmt("min eigenvalue GH %.4g, MC %.4g (need > 1e-8); modes %s on pass/fail", gh.min_eigenvalue,
              mc.min_eigenvalue, agree ? "agree" : "disagree")};
}

Outcome chi2_reduction() {
  const auto& s = limit_sample(1);
  const auto sum = summarize(s.values);
  const double q95 = quantile_type7(s.values, 0.95);
  const double ref95 = boost::math::quantile(boost::math::chi_squared(4.0), 0.95);
  const bool ok = std::abs(sum.mean - 4.0) <= 0.05 * 4.0 && std::abs(q95 - 9.4877) <= 0.05 * 9.4877;
  return {ok, fmt("mean %.4f (4 +- 5%%), q95 %.4f (9.4877 +- 5%%; chi2_4 q95 = %.4f)", sum.mean, q95, ref95)};
}

Outcome regular_lr() {
  auto c = default_desk_experiment();
  c.base_seed = 5005;
  const auto m = run_replicates(c, threads());
  const auto lr = m.lr_sample(0, 0);
  if (lr.empty()) return {false, "every replicate failed"};
  const auto sum = summarize(lr, limit_sample(1).values);
  const bool ok = std::abs(sum.mean - 4.0) <= 0.2 * 4.0 && *sum.ks <= 0.15 && m.failures() == 0;
  return {ok, fmt("%zu replicates (%zu failed): mean 2lambda %.4f (4 +- 20%%), KS %.4f (<= 0.15)", lr.size(),
                  m.failures(), sum.mean, *sum.ks)};
}

Outcome tightness() {
  const auto& m = overparam_matrix();
  std::vector<double> med, pooled;
  for (std::size_t ni = 0; ni < m.n_grid.size(); ++ni) {
    const auto s = m.lr_sample(ni, 0);
    med.push_back(quantile_type7(s, 0.5));
    pooled.insert(pooled.end(), s.begin(), s.end());
  }
  const double pm = quantile_type7(pooled, 0.5);
  double worst = 0.0;
  for (std::size_t a = 0; a < med.size(); ++a)
    for (std::size_t b = a + 1; b < med.size(); ++b) worst = std::max(worst, std::abs(med[a] - med[b]));
  const bool ok = worst <= 0.3 * pm && m.failures() == 0;
  return {ok, fmt("medians at n=200/500/1000: %.4f %.4f %.4f; max gap %.4f vs 30%% of pooled median %.4f = %.4f "
                  "(%zu failed cells)",
                  med[0], med[1], med[2], worst, pm, 0.3 * pm, m.failures())};
}

Outcome distributional_check() {
  const auto& m = overparam_matrix();
  const auto lr = m.lr_sample(2, 0);  // n = 1000
  const auto& lim = limit_sample(2);
  const auto sum = summarize(lr, lim.values);
  const auto ls = summarize(lim.values);
  return {*sum.ks <= 0.20, fmt("KS %.4f (<= 0.20); empirical mean %.4f median %.4f, limit mean %.4f median %.4f",
                               *sum.ks, sum.mean, sum.quantiles[2], ls.mean, ls.quantiles[2])};
}

Outcome consistency() {
  auto c = default_desk_experiment();
  c.n_grid = {500, 2000};
  c.k_grid = {1, 2, 3};
  c.replicates = 100;
  c.base_seed = 8008;
  const auto m = run_replicates(c, threads());
  const auto freq = summarize_experiment(m, 1, {}).k_hat_frequency;
  const double f500 = freq.at(500), f2000 = freq.at(2000);
  const double se = std::sqrt(f500 * (1 - f500) / 100.0 + f2000 * (1 - f2000) / 100.0);
  const bool ok = f2000 >= 0.9 && f2000 >= f500 - 2.0 * se && m.failures() == 0;
  return {ok, fmt("freq(k_hat = 1) at n=500 %.2f, n=2000 %.2f (>= 0.9; drop <= 2 SE = %.3f; %zu failed cells)", f500,
                  f2000, 2.0 * se, m.failures())};
}

Outcome structural() {
  std::vector<std::string> bad;
  if (enumerate_partitions(2, 1).size() != 2) bad.push_back("partitions(2,1)");
  if (enumerate_partitions(3, 2).size() != 3) bad.push_back("partitions(3,2)");
  if (delta_feasible({{1.0, 0.5}})) bad.push_back("delta singleton");
  if (!delta_feasible({{1.0, 0.5}, {-2.0, -1.0}})) bad.push_back("delta antiparallel");
  if (delta_feasible({{1.0, 0.0}, {0.0, 1.0}})) bad.push_back("delta orthant");

  const auto& g = desk_gram();
  Rng rng(909);
  double idem = 0.0, unit = 0.0;
  for (int r = 0; r < 100; ++r) {
    Eigen::VectorXd c(g.sigma.rows());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.normal();
    const auto n1 = normalize_score(c, g);
    idem = std::max(idem, (normalize_score(n1, g) - n1).cwiseAbs().maxCoeff());
    unit = std::max(unit, std::abs(n1.dot(g.sigma * n1) - 1.0));
  }
  if (idem > 1e-12 || unit > 1e-10) bad.push_back("normalization");

  LimitOptions opt;
  opt.threads = threads();
  const auto spec = default_desk_spec();
  const auto s1 = simulate_limit(spec, 1, g, 300, 77, opt);
  const auto s2 = simulate_limit(spec, 2, g, 300, 77, opt);
  const auto s3 = simulate_limit(spec, 3, g, 300, 77, opt);
  double worst = 0.0;
  for (std::size_t j = 0; j < 300; ++j) {
    worst = std::max({worst, s1.values[j] - s2.values[j], s2.values[j] - s3.values[j]});
  }
  if (worst > 1e-8) bad.push_back("monotone in k");

  const double asym = (g.x_gram - g.x_gram.transpose()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.x_gram);
  const double min_eig = es.eigenvalues().minCoeff();
  if (asym > 1e-12 || min_eig < -1e-10) bad.push_back("gram symmetry/PSD");

  std::string failed;
  for (const auto& b : bad) failed += (failed.empty() ? "" : ", ") + b;
  return {bad.empty(), fmt("partitions, delta table, normalization (%.2g), k-monotonicity (worst %.2g), gram "
                           "asymmetry %.2g, min eigenvalue %.3g%s%s",
                           idem, worst, asym, min_eig, bad.empty() ? "" : "; failed: ", failed.c_str())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "derivative catalog", 10, derivative_catalog},
      {2, "expansion remainder order", 10, expansion_order},
      {3, "linear independence certificate", 30, h4_certificate},
      {4, "chi-square reduction at k = k0", 120, chi2_reduction},
      {5, "regular-case empirical LR", 1200, regular_lr},
      {6, "tightness under over-parameterization", 2400, tightness},
      {7, "limit law at k = k0 + 1", 1800, distributional_check},
      {8, "architecture selection consistency", 2400, consistency},
      {9, "structural invariants", 60, structural},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %d %s: %s | %s | %.1f s (budget %.0f s)%s\n", c.id, c.name, pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : " over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
