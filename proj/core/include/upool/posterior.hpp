#pragma once
// Grid approximation of the joint posterior of (partition, delta2), its
// marginals, exact mixture moments of mu, and posterior draws of mu.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "upool/grid.hpp"
#include "upool/partitions.hpp"
#include "upool/summary.hpp"
#include "upool/survey_data.hpp"

namespace upool {

inline constexpr std::size_t kDefaultDraws = 5000;
inline constexpr std::size_t kDefaultMaxCells = std::size_t{1} << 27;
inline constexpr double kDefaultDisplayThreshold = 0.001;

struct EvaluateOptions {
  // Use the per-subset cache once L reaches this size.
  int factorize_from = 8;
  // Refuse to allocate more than this many (partition, delta2) cells.
  std::size_t max_cells = kDefaultMaxCells;
};

struct JointGridPosterior {
  DeltaGrid grid;
  std::shared_ptr<const PartitionSpace> space;
  std::vector<double> log_mass;  // G x R, row-major by partition
  double log_evidence = 0.0;     // log of the normalizing sum

  std::size_t partitions() const noexcept { return space ? space->size() : 0; }
  std::size_t cells() const noexcept { return grid.size(); }
  double log_mass_at(std::size_t g, std::size_t j) const { return log_mass[g * cells() + j]; }
};

// Normalized grid posterior. Each cell scores
//   log(1/G) + log(1/R) + sum_k log_cluster_term(S_k(g), delta2_j)
// and the table is normalized by log-sum-exp. Throws DomainError when the
// data and space disagree on L or the table would exceed max_cells, and
// ComputationError naming the cell when a score is not finite.
JointGridPosterior evaluate_joint(const SurveyData& data,
                                  std::shared_ptr<const PartitionSpace> space,
                                  const DeltaGrid& grid, const EvaluateOptions& options = {});
JointGridPosterior evaluate_joint(const SurveyData& data, const PartitionSpace& space,
                                  const DeltaGrid& grid, const EvaluateOptions& options = {});

std::vector<double> marginal_g(const JointGridPosterior& jp);
std::vector<double> marginal_delta2(const JointGridPosterior& jp);

struct PosteriorDraws {
  std::size_t b = 0;
  int n = 0;
  std::vector<double> mu;  // b x n, row-major by draw
  std::vector<std::size_t> g_indices;
  std::vector<std::size_t> delta2_indices;
  std::vector<double> delta2_values;
  std::uint64_t seed = 0;

  double mu_at(std::size_t draw, int i) const {
    return mu[draw * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
  }
};

// Draws b cells with replacement in proportion to their posterior mass, then
// for each cell and cluster k draws nu_k ~ N(mu_hat_k, delta2 / sum lambda)
// and mu_i ~ N(lambda_i y_i + (1 - lambda_i) nu_k, lambda_i V_i). Draw d uses
// the substream (seed, d), so output does not depend on thread count.
PosteriorDraws sample_mu(const SurveyData& data, const JointGridPosterior& jp, std::size_t b,
                         std::uint64_t seed);

struct MixtureMoments {
  std::vector<double> mean;
  std::vector<double> sd;
};

// Posterior mean and SD of each mu_i, mixing the conditional moments over
// every grid cell (law of total variance). No Monte Carlo error.
MixtureMoments exact_mixture_moments(const SurveyData& data, const JointGridPosterior& jp);

// Per-source rows (means/SDs from the exact mixture, 95% equal-tailed
// intervals from the draws) and partitions with p(g|y) >= threshold.
SummaryTable summarize(const SurveyData& data, const JointGridPosterior& jp,
                       const PosteriorDraws& draws,
                       double threshold = kDefaultDisplayThreshold);

}  // namespace upool
