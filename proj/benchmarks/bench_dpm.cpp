#include <benchmark/benchmark.h>

#include "upool/dpm.hpp"

using namespace upool;

namespace {

void BM_DpmGibbs(benchmark::State& state) {
  const auto d = SurveyData::from_se({0.254, 0.361, 0.359}, {0.014, 0.028, 0.028});
  DpmConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  cfg.burn_in = cfg.iterations / 6;
  for (auto _ : state) benchmark::DoNotOptimize(dpm_gibbs(d, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DpmGibbs)->Arg(12000)->Unit(benchmark::kMillisecond);

void BM_DpmExact(benchmark::State& state) {
  const auto d = SurveyData::from_se({0.1, 0.12, 0.3, 0.31, 0.2, 0.5},
                                     {0.02, 0.03, 0.02, 0.05, 0.04, 0.03});
  for (auto _ : state) benchmark::DoNotOptimize(dpm_exact(d, 0.25, 0.01, 3.0));
}
BENCHMARK(BM_DpmExact);

}  // namespace
