#include <cmath>
#include <cstdint>
#include <vector>

#include <benchmark/benchmark.h>

#include "cavity_et/dynamics.hpp"
#include "cavity_et/fullsim.hpp"
#include "cavity_et/model.hpp"
#include "cavity_et/rates.hpp"
#include "cavity_et/spectra.hpp"

namespace {

using namespace cavity_et;

ModelParams pumped_reference() {
  ModelParams p = reference_params();
  p.cavity_pump = 1e-3;
  return p;
}

// Eight pairs at strong pumping: the small system used for trajectory comparisons.
ModelParams small_system() {
  ModelParams p;
  p.n_pairs = 8;
  p.cavity_decay = 1.0;
  p.coupling = 0.2 / std::sqrt(8.0);
  p.cavity_pump = 1e-2;
  p.pair_decay = 3e-7;
  p.pair_pump = 3e-7 / 6.0;
  p.detuning = 0.2;
  p.tunneling = 0.1;
  p.acceptor_relaxation = 1e-2;
  return p;
}

void BM_BrightEigensystem(benchmark::State& state) {
  const ModelParams p = pumped_reference();
  for (auto _ : state) benchmark::DoNotOptimize(bright_block(p, p.n_pairs));
}
BENCHMARK(BM_BrightEigensystem);

void BM_TransferRate(benchmark::State& state) {
  const ModelParams p = pumped_reference();
  const DarkEigensystem dark = dark_block(p);
  for (auto _ : state) benchmark::DoNotOptimize(transfer_rate(p, p.n_pairs, dark));
}
BENCHMARK(BM_TransferRate);

void BM_RateTable(benchmark::State& state) {
  ModelParams p = pumped_reference();
  p.n_pairs = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(rate_table(p, p.n_pairs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RateTable)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EffectiveTrajectory(benchmark::State& state) {
  const ModelParams p = pumped_reference();
  const std::vector<double> rates = total_rates(rate_table(p, p.n_pairs));
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sample_trajectory(rates, seed++));
}
BENCHMARK(BM_EffectiveTrajectory)->Unit(benchmark::kMicrosecond);

void BM_FullSimTrajectory(benchmark::State& state) {
  const FullSimulator sim(small_system());
  const std::vector<double> grid = log_grid(1e2, 1e8, 121);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sim.run_trajectory(grid, seed++));
}
BENCHMARK(BM_FullSimTrajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
