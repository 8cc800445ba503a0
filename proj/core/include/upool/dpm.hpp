#pragma once
// Dirichlet process mixture baseline:
//
//   y_i | theta_i ~ N(theta_i, V_i),  theta_i | H ~ H,  H ~ DP(M, N(eta, tau2))
//   eta ~ N(eta_b, S_b),  1/tau2 ~ Gamma(phi1/2, rate phi2/2),  M fixed.
//
// dpm_gibbs runs a collapsed Gibbs sampler over cluster labels; dpm_exact
// enumerates partitions for fixed (eta, tau2, M) and serves as its oracle.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "upool/partitions.hpp"
#include "upool/summary.hpp"
#include "upool/survey_data.hpp"

namespace upool {

inline constexpr int kDpmExactMaxSources = 8;

struct DpmConfig {
  double m = 3.0;
  // Unset hyperparameters take data-driven defaults, see resolve().
  std::optional<double> eta_b;
  std::optional<double> s_b;
  std::optional<double> phi1;
  std::optional<double> phi2;
  // Holding eta / tau2 fixed turns off their Gibbs updates.
  std::optional<double> fixed_eta;
  std::optional<double> fixed_tau2;
  int iterations = 12000;  // total sweeps, burn-in included
  int burn_in = 2000;
  int thin = 1;
  std::uint64_t seed = 1;
};

struct DpmHyperparameters {
  double m = 0.0;
  double eta_b = 0.0;
  double s_b = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
};

// Fills unset values: eta_b = precision-weighted mean of y, S_b = (max y -
// min y)^2, phi1 = 2, phi2 = 2 * sample variance of y. Degenerate spreads fall
// back to the mean sampling variance. Throws DomainError for non-finite or
// non-positive results.
DpmHyperparameters resolve_hyperparameters(const SurveyData& data, const DpmConfig& cfg);

struct DpmDraws {
  int n = 0;
  std::size_t retained = 0;
  std::vector<int> assignments;  // retained x n, canonical RGS per draw
  std::vector<double> mu;        // retained x n
  std::vector<double> eta;
  std::vector<double> tau2;
  DpmHyperparameters hyper;
  std::uint64_t seed = 0;

  std::vector<SummaryRow> rows;  // per-source posterior summaries
  // Frequencies of retained partitions keyed by cluster-set notation.
  std::vector<PartitionProbability> partition_frequencies;
};

// M^(k-1) prod_j Gamma(L_j) / prod_{i=1}^{L-1} (M + i). Throws DomainError
// for m <= 0.
double dpm_partition_prior(const Partition& p, double m);

// Prior probability of k = 1..L clusters.
std::vector<double> dpm_cluster_count_prior(int sources, double m);

// Log marginal likelihood of one cluster's estimates with theta ~ N(eta, tau2)
// integrated out.
double dpm_log_cluster_marginal(const SurveyData& data, const std::vector<int>& members,
                                double eta, double tau2);

struct DpmExact {
  PartitionSpace space;
  std::vector<double> probabilities;  // aligned with space
  std::vector<double> mean;
  std::vector<double> sd;
};

// Exact posterior over partitions for fixed (eta, tau2, M) and the mixed
// per-source moments of theta_i. Throws DomainError for L > 8.
DpmExact dpm_exact(const SurveyData& data, double eta, double tau2, double m);

DpmDraws dpm_gibbs(const SurveyData& data, const DpmConfig& cfg);

}  // namespace upool
