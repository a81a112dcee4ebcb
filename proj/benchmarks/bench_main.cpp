#include <benchmark/benchmark.h>

#include "mlplr/estimation.hpp"
#include "mlplr/gram.hpp"
#include "mlplr/likelihood.hpp"
#include "mlplr/limit_law.hpp"

using namespace mlplr;

namespace {

MlpParams wide_params(std::size_t k, std::size_t d) {
  Rng rng(1);
  MlpParams p;
  p.beta = rng.normal();
  for (std::size_t i = 0; i < k; ++i) {
    HiddenUnit u{rng.uniform(0.1, 1.0), {}};
    for (std::size_t l = 0; l <= d; ++l) u.w.push_back(rng.normal());
    p.units.push_back(u);
  }
  return p;
}

void BM_Forward(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto p = wide_params(k, 3);
  const std::vector<double> x{0.1, -0.4, 1.2};
  for (auto _ : state) benchmark::DoNotOptimize(mlp_forward(p, x));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(4)->Arg(16);

void BM_LoglikGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = generate_dataset(default_desk_spec(), n, 3);
  const auto p = wide_params(2, 1);
  std::vector<double> g(p.flat_size());
  for (auto _ : state) benchmark::DoNotOptimize(conditional_loglik_with_gradient(p, data, g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LoglikGradient)->Arg(500)->Arg(2000);

void BM_FitMle(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto data = generate_dataset(default_desk_spec(), 500, 5);
  FitConfig cfg;
  cfg.n_starts = 5;
  for (auto _ : state) benchmark::DoNotOptimize(fit_mle(data, k, default_desk_box(), cfg).loglik);
}
BENCHMARK(BM_FitMle)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_SimulateLimit(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto spec = default_desk_spec();
  const auto gram = gram_matrix_gauss_hermite(spec);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_limit(spec, k, gram, 200, 7).values.back());
  state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_SimulateLimit)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_GramMonteCarlo(benchmark::State& state) {
  const auto spec = default_desk_spec();
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(spec, 40960, 1).x_gram(1, 1));
}
BENCHMARK(BM_GramMonteCarlo)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
