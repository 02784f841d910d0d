// Serial reference vs OpenMP kernels, plus sweep scaling in the number of
// (auction, slot) pairs.
#include <benchmark/benchmark.h>

#include <vector>

#include "gspr/equilibrium.hpp"
#include "gspr/harness/config_io.hpp"
#include "gspr/harness/experiments.hpp"
#include "gspr/random.hpp"
#include "gspr/reserve_density.hpp"
#include "gspr/reserve_discriminative.hpp"

using namespace gspr;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

std::vector<double> uniform_draws(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform();
  return v;
}

harness::Simulation simulated(std::size_t n_train) {
  auto config = harness::default_experiment_config();
  config.n_train = n_train;
  return harness::simulate_auctions(config);
}

void BM_BuildSystem(benchmark::State& state) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto sample = equilibrium::ValuationSample::from_draws(uniform_draws(state.range(0), 1));
  for (auto _ : state) benchmark::DoNotOptimize(equilibrium::build_system(sample, cfg, mode(state)));
}
BENCHMARK(BM_BuildSystem)->ArgsProduct({{500, 1000, 2000, 4000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_RecoverValuations(benchmark::State& state) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto sim = simulated(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(density::recover_valuations(sim.dataset.auctions, cfg, mode(state)));
}
BENCHMARK(BM_RecoverValuations)->ArgsProduct({{300, 3000, 30000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_AuctionLosses(benchmark::State& state) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto sim = simulated(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(discriminative::auction_losses(1.3, sim.dataset.auctions, cfg, mode(state)));
}
BENCHMARK(BM_AuctionLosses)->ArgsProduct({{3000, 30000, 300000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_ConvergenceSweep(benchmark::State& state) {
  const auto cfg = AuctionConfig::with_unit_ctr(3, {1.0, 0.5});
  const std::vector<std::size_t> n_list{100, 200, 400, 800, 1600};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        equilibrium::convergence_sweep(uniform_draws, n_list, state.range(0), cfg, 2000, 7, mode(state)));
}
BENCHMARK(BM_ConvergenceSweep)->ArgsProduct({{10}, {0, 1}})->Unit(benchmark::kMillisecond);

// Doubling the pair count should roughly double the sweep time (n log n).
void BM_SweepScaling(benchmark::State& state) {
  const auto cfg = harness::default_experiment_config().auction;
  const auto sim = simulated(state.range(0));
  const auto bp = discriminative::extract_breakpoints(sim.dataset.auctions, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(discriminative::minimize(bp));
  state.SetComplexityN(static_cast<std::int64_t>(bp.pairs.size()));
}
BENCHMARK(BM_SweepScaling)->RangeMultiplier(2)->Range(1000, 64000)->Complexity(benchmark::oNLogN)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
