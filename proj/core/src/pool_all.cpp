#include "upool/pool_all.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "upool/errors.hpp"
#include "upool/model.hpp"
#include "upool/rng.hpp"

namespace upool {

NuConditional nu_given_delta2(const SurveyData& data, double delta2) {
  double w_sum = 0.0;
  double wy_sum = 0.0;
  for (int i = 0; i < data.size(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    const double w = 1.0 / (data.v[u] + delta2);
    w_sum += w;
    wy_sum += w * data.y_hat[u];
  }
  return {wy_sum / w_sum, 1.0 / w_sum};
}

std::vector<double> single_cluster_delta2_weights(const SurveyData& data, const DeltaGrid& grid) {
  const ClusterMask all = (ClusterMask{1} << data.size()) - 1;
  std::vector<double> logw(grid.size());
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    logw[j] = grid.log_prior_mass[j] + log_cluster_term(data, all, grid.deltas2[j]);
    top = std::max(top, logw[j]);
  }
  double sum = 0.0;
  for (double& w : logw) {
    w = std::exp(w - top);
    sum += w;
  }
  for (double& w : logw) w /= sum;
  return logw;
}

PoolAllPosterior pool_all(const SurveyData& data, const DeltaGrid& grid,
                          std::span<const double> delta2_weights, std::size_t draws,
                          std::uint64_t seed) {
  data.validate();
  if (data.size() < 2) throw DomainError("pool_all: need at least two sources");
  if (delta2_weights.size() != grid.size()) {
    throw DomainError("pool_all: weight vector does not match the grid");
  }
  if (draws < 1) throw DomainError("pool_all: need at least one draw");

  const std::size_t R = grid.size();
  std::vector<NuConditional> cond(R);
  double total = 0.0;
  for (std::size_t j = 0; j < R; ++j) {
    cond[j] = nu_given_delta2(data, grid.deltas2[j]);
    total += delta2_weights[j];
  }
  // Moments about the first conditional mean to limit cancellation.
  const double shift = cond.front().mean;
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t j = 0; j < R; ++j) {
    const double w = delta2_weights[j] / total;
    const double c = cond[j].mean - shift;
    m1 += w * c;
    m2 += w * (cond[j].var + c * c);
  }

  PoolAllPosterior out;
  out.mean = shift + m1;
  out.sd = std::sqrt(std::max(0.0, m2 - m1 * m1));
  out.delta2_weights.assign(delta2_weights.begin(), delta2_weights.end());

  std::vector<double> cumulative(R);
  double acc = 0.0;
  for (std::size_t j = 0; j < R; ++j) cumulative[j] = acc += delta2_weights[j];
  std::vector<double> sample(draws);
  for (std::size_t d = 0; d < draws; ++d) {
    auto rng = CounterRng::substream(seed, d);
    const double u = rng.uniform() * acc;
    auto j = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    j = std::min(j, R - 1);
    std::normal_distribution<double> normal;
    sample[d] = cond[j].mean + std::sqrt(cond[j].var) * normal(rng);
  }
  std::sort(sample.begin(), sample.end());
  out.lower = sorted_quantile(sample, 0.025);
  out.upper = sorted_quantile(sample, 0.975);
  return out;
}

PoolAllPosterior pool_all(const SurveyData& data, const DeltaGrid& grid, PoolAllMixing mixing,
                          std::size_t draws, std::uint64_t seed) {
  data.validate();
  if (data.size() < 2) throw DomainError("pool_all: need at least two sources");
  std::vector<double> weights;
  if (mixing == PoolAllMixing::kSingleCluster) {
    weights = single_cluster_delta2_weights(data, grid);
  } else {
    const auto space = std::make_shared<const PartitionSpace>(enumerate_partitions(data.size()));
    weights = marginal_delta2(evaluate_joint(data, space, grid));
  }
  auto out = pool_all(data, grid, weights, draws, seed);
  out.mixing = mixing;
  return out;
}

}  // namespace upool
