#include <benchmark/benchmark.h>

#include "kglab/bounds.hpp"
#include "kglab/kg_policy.hpp"
#include "kglab/math_kernel.hpp"

namespace {

void BM_LogFNegDirect(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kglab::log_f_neg(x));
    x = x < 7.5 ? x + 0.25 : 0.5;
  }
}
BENCHMARK(BM_LogFNegDirect);

void BM_LogFNegSeries(benchmark::State& state) {
  double x = 9.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kglab::log_f_neg(x));
    x = x < 300.0 ? x + 1.5 : 9.0;
  }
}
BENCHMARK(BM_LogFNegSeries);

void BM_SelectArm(benchmark::State& state) {
  const auto inst = state.range(0) == 10 ? kglab::catalog(1) : kglab::catalog(5);
  kglab::RngStream rng(0, 0);
  const auto s = kglab::init_state(inst, 5, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kglab::select_arm(s));
}
BENCHMARK(BM_SelectArm)->Arg(10)->Arg(20);

void BM_RunKg(benchmark::State& state) {
  const auto inst = kglab::catalog(1);
  const auto horizon = static_cast<std::uint64_t>(state.range(0));
  const std::vector<std::uint64_t> cps = {horizon};
  std::uint64_t rep = 0;
  for (auto _ : state) {
    kglab::RngStream rng(0, rep++);
    benchmark::DoNotOptimize(kglab::run_kg(inst, horizon, 5, rng, cps));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunKg)->Arg(1000)->Arg(10000);

void BM_EvaluateBounds(benchmark::State& state) {
  const auto c = kglab::catalog(2).constants();
  const auto t = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kglab::evaluate_bounds(c, t));
}
BENCHMARK(BM_EvaluateBounds)->Arg(1000)->Arg(1'000'000'000);

}  // namespace

BENCHMARK_MAIN();
