#include <benchmark/benchmark.h>

#include "cccp/chain_model.hpp"
#include "cccp/exact_hitting.hpp"
#include "cccp/random.hpp"
#include "cccp/simulator.hpp"

namespace {

void BM_HessenbergSolve(benchmark::State& state) {
  const cccp::Params params(static_cast<std::uint32_t>(state.range(0)), 0.001);
  for (auto _ : state) benchmark::DoNotOptimize(cccp::solve_hitting_times(params));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HessenbergSolve)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Arg(4000)->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);

void BM_DenseOracle(benchmark::State& state) {
  const cccp::Params params(static_cast<std::uint32_t>(state.range(0)), 0.01);
  for (auto _ : state) benchmark::DoNotOptimize(cccp::dense_oracle_solve(params));
}
BENCHMARK(BM_DenseOracle)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ReducedStep(benchmark::State& state) {
  const cccp::Params params(static_cast<std::uint32_t>(state.range(0)), 2.0 / state.range(0));
  const cccp::ReducedStepper step(params);
  cccp::Rng rng(1);
  std::uint32_t k = 0;
  for (auto _ : state) {
    k = step(k, rng);
    benchmark::DoNotOptimize(k);
  }
}
BENCHMARK(BM_ReducedStep)->Arg(10)->Arg(300)->Arg(10000);

void BM_FullStep(benchmark::State& state) {
  const cccp::Params params(static_cast<std::uint32_t>(state.range(0)), 2.0 / state.range(0));
  cccp::FullState s(params.n());
  cccp::Rng rng(1);
  for (auto _ : state) {
    cccp::advance_full(s, params, rng);
    benchmark::DoNotOptimize(s.size());
  }
}
BENCHMARK(BM_FullStep)->Arg(10)->Arg(300);

void BM_HittingBatch(benchmark::State& state) {
  const cccp::Params params(10, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(cccp::batch_hitting_stats(params, 1000, 7));
}
BENCHMARK(BM_HittingBatch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
