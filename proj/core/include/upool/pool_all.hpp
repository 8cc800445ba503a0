#pragma once
// Complete pooling: every source shares one cluster mean nu.
//
//   nu | delta2, y ~ N( sum y_i/(V_i + delta2) / sum 1/(V_i + delta2),
//                      1 / sum 1/(V_i + delta2) )
//
// mixed over a posterior for delta2 on the grid.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "upool/grid.hpp"
#include "upool/posterior.hpp"
#include "upool/summary.hpp"
#include "upool/survey_data.hpp"

namespace upool {

enum class PoolAllMixing {
  // f(delta2 | y): the delta2 marginal of the full partition posterior.
  kJointMarginal,
  // f(delta2 | y, g = pool-all): the posterior with the partition fixed.
  kSingleCluster,
};

struct PoolAllPosterior {
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  PoolAllMixing mixing = PoolAllMixing::kJointMarginal;
  std::vector<double> delta2_weights;  // mixing weights over the grid

  PoolAllRow row() const { return {mean, sd, lower, upper}; }
};

struct NuConditional {
  double mean = 0.0;
  double var = 0.0;
};

NuConditional nu_given_delta2(const SurveyData& data, double delta2);

// delta2 weights for the single-cluster posterior on the grid (sum to 1).
std::vector<double> single_cluster_delta2_weights(const SurveyData& data, const DeltaGrid& grid);

// Mixes nu | delta2 over the supplied weights. Mean/SD are exact; the interval
// uses equal-tailed quantiles of `draws` samples. Throws DomainError for L < 2
// or a weight vector that does not match the grid.
PoolAllPosterior pool_all(const SurveyData& data, const DeltaGrid& grid,
                          std::span<const double> delta2_weights,
                          std::size_t draws = kDefaultDraws, std::uint64_t seed = 1);

// Convenience form that computes the weights for the chosen mixing. The
// joint-marginal form enumerates all partitions of the data.
PoolAllPosterior pool_all(const SurveyData& data, const DeltaGrid& grid,
                          PoolAllMixing mixing = PoolAllMixing::kJointMarginal,
                          std::size_t draws = kDefaultDraws, std::uint64_t seed = 1);

}  // namespace upool
