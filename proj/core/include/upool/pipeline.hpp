#pragma once
// End-to-end uncertain pooling run: joint grid posterior, draws, summary and
// the pool-all row.

#include <cstdint>
#include <memory>

#include "upool/grid.hpp"
#include "upool/pool_all.hpp"
#include "upool/posterior.hpp"
#include "upool/summary.hpp"
#include "upool/survey_data.hpp"

namespace upool {

struct PoolSettings {
  std::size_t r = kDefaultGridSize;
  std::size_t b = kDefaultDraws;
  std::uint64_t seed = 1;
  double delta_scale = kDefaultDeltaScale;
  double threshold = kDefaultDisplayThreshold;
  int max_sources = kDefaultMaxSources;
  PoolAllMixing pool_all_mixing = PoolAllMixing::kJointMarginal;
  EvaluateOptions evaluate;
};

struct PoolResult {
  JointGridPosterior joint;
  PosteriorDraws draws;
  SummaryTable summary;
};

// Pool-all is computed only when L >= 2.
PoolResult run_uncertain_pooling(const SurveyData& data, const PoolSettings& settings);

// Seed used for the pool-all interval draws, kept apart from the mu draws.
std::uint64_t pool_all_seed(std::uint64_t seed);

}  // namespace upool
