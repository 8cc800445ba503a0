#pragma once
// Closed-form quantities of the uncertain pooling model for one partition g and
// a common between-source variance delta2 shared by every cluster.
//
//   lambda_i   = delta2 / (delta2 + V_i)
//   mu_hat_k   = sum_{i in S_k} lambda_i y_i / sum_{i in S_k} lambda_i
//   E(mu_i)    = lambda_i y_i + (1 - lambda_i) mu_hat_k
//   Q          = sum_k sum_{i in S_k} (lambda_i / delta2) (y_i - mu_hat_k)^2
//
// and the log posterior kernel of (g, delta2):
//
//   log f(delta2) + log f(g) - d(g)/2 + 1/2 sum_i log(1 - lambda_i) - Q/2

#include <span>
#include <vector>

#include "upool/partitions.hpp"
#include "upool/survey_data.hpp"

namespace upool {

struct ClusterStats {
  std::vector<double> lambda;  // aligned with the cluster's members
  double lambda_sum = 0.0;
  double mu_hat = 0.0;
  double log_one_minus_lambda_sum = 0.0;
  double q = 0.0;       // this cluster's contribution to Q
  double nu_var = 0.0;  // delta2 / lambda_sum = 1 / sum 1/(V_i + delta2)
};

// Dense row-major L x L matrix.
struct ConditionalMoments {
  std::vector<double> mean;
  std::vector<double> cov;
  int n = 0;

  double cov_at(int i, int j) const {
    return cov[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
               static_cast<std::size_t>(j)];
  }
};

// delta2 / (delta2 + v_i); 0 when delta2 == 0.
double shrinkage(double delta2, double v_i) noexcept;

// Throws DomainError for an empty cluster or delta2 <= 0.
ClusterStats cluster_stats(const SurveyData& data, std::span<const int> cluster, double delta2);
ClusterStats cluster_stats(const SurveyData& data, ClusterMask cluster, double delta2);

ConditionalMoments conditional_moments(const SurveyData& data, const Partition& p, double delta2);

// Per-source mean and variance only (the diagonal of conditional_moments).
void conditional_marginals(const SurveyData& data, const Partition& p, double delta2,
                           std::span<double> mean, std::span<double> var);

double q_statistic(const SurveyData& data, const Partition& p, double delta2);

// Unnormalized Inverse Beta log-density -log(1 + delta2) - log(delta2)/2.
// Throws DomainError for delta2 <= 0.
double log_inv_beta_prior(double delta2);

// Log contribution of one cluster to the likelihood part of the kernel:
// -1/2 + 1/2 sum log(1 - lambda_i) - Q_k / 2.
double log_cluster_term(const SurveyData& data, ClusterMask cluster, double delta2);

// The kernel without its prior terms: sum over clusters of log_cluster_term.
double log_partition_likelihood(const SurveyData& data, const Partition& p, double delta2);

// Full log kernel of (g, delta2): log_inv_beta_prior + log_prior_g +
// log_partition_likelihood.
double log_joint_kernel(const SurveyData& data, const Partition& p, double delta2,
                        double log_prior_g);

}  // namespace upool
