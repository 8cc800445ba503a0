#include <benchmark/benchmark.h>

#include <memory>

#include "upool/partitions.hpp"
#include "upool/pipeline.hpp"
#include "upool/posterior.hpp"

using namespace upool;

namespace {

SurveyData dixie() { return SurveyData::from_se({0.254, 0.361, 0.359}, {0.014, 0.028, 0.028}); }

SurveyData eight_sources() {
  return SurveyData::from_se({0.1, 0.12, 0.3, 0.31, 0.2, 0.5, 0.33, 0.11},
                             {0.02, 0.03, 0.02, 0.05, 0.04, 0.03, 0.01, 0.06});
}

void BM_EvaluateJointL3(benchmark::State& state) {
  const auto d = dixie();
  const auto space = std::make_shared<const PartitionSpace>(enumerate_partitions(3));
  const auto grid = build_grid(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_joint(d, space, grid));
}
BENCHMARK(BM_EvaluateJointL3)->Arg(2000)->Arg(8000);

void BM_EvaluateJointL8(benchmark::State& state) {
  const auto d = eight_sources();
  const auto space = std::make_shared<const PartitionSpace>(enumerate_partitions(8));
  const auto grid = build_grid(200);
  EvaluateOptions opt;
  opt.factorize_from = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_joint(d, space, grid, opt));
}
BENCHMARK(BM_EvaluateJointL8)->Arg(8)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_SampleMu(benchmark::State& state) {
  const auto d = dixie();
  const auto jp = evaluate_joint(d, enumerate_partitions(3), build_grid(2000));
  for (auto _ : state) benchmark::DoNotOptimize(sample_mu(d, jp, 5000, 1));
}
BENCHMARK(BM_SampleMu);

void BM_FullPipeline(benchmark::State& state) {
  const auto d = dixie();
  PoolSettings s;
  for (auto _ : state) benchmark::DoNotOptimize(run_uncertain_pooling(d, s));
}
BENCHMARK(BM_FullPipeline)->Unit(benchmark::kMillisecond);

void BM_EnumeratePartitions(benchmark::State& state) {
  const int l = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_partitions(l));
}
BENCHMARK(BM_EnumeratePartitions)->Arg(6)->Arg(10);

}  // namespace
