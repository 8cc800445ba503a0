#include "upool/pipeline.hpp"

#include "upool/rng.hpp"

namespace upool {

std::uint64_t pool_all_seed(std::uint64_t seed) { return derive_key(seed, 0x706f6f6c2d616c6cULL); }

PoolResult run_uncertain_pooling(const SurveyData& data, const PoolSettings& settings) {
  data.validate();
  const auto space = std::make_shared<const PartitionSpace>(
      enumerate_partitions(data.size(), settings.max_sources));
  const auto grid = build_grid(settings.r, settings.delta_scale);
  PoolResult result{evaluate_joint(data, space, grid, settings.evaluate), {}, {}};
  result.draws = sample_mu(data, result.joint, settings.b, settings.seed);
  result.summary = summarize(data, result.joint, result.draws, settings.threshold);
  if (data.size() >= 2) {
    const auto weights = settings.pool_all_mixing == PoolAllMixing::kJointMarginal
                             ? marginal_delta2(result.joint)
                             : single_cluster_delta2_weights(data, grid);
    result.summary.pool_all =
        pool_all(data, grid, weights, settings.b, pool_all_seed(settings.seed)).row();
  }
  return result;
}

}  // namespace upool
