#include "upool/model.hpp"

#include <cmath>
#include <string>

#include "upool/errors.hpp"

namespace upool {

void SurveyData::validate() const {
  if (y_hat.empty()) throw DomainError("survey data: need at least one source");
  if (v.size() != y_hat.size()) throw DomainError("survey data: estimate/variance size mismatch");
  if (!labels.empty() && labels.size() != y_hat.size()) {
    throw DomainError("survey data: label count mismatch");
  }
  for (std::size_t i = 0; i < y_hat.size(); ++i) {
    if (!std::isfinite(y_hat[i])) {
      throw DomainError("survey data: estimate " + std::to_string(i + 1) + " is not finite");
    }
    if (!std::isfinite(v[i]) || !(v[i] > 0.0)) {
      throw DomainError("survey data: variance " + std::to_string(i + 1) + " must be > 0");
    }
  }
}

SurveyData SurveyData::from_se(std::vector<double> y_hat, const std::vector<double>& se,
                               std::vector<std::string> labels) {
  SurveyData d;
  d.y_hat = std::move(y_hat);
  d.v.reserve(se.size());
  for (double s : se) d.v.push_back(s * s);
  if (labels.empty()) {
    for (std::size_t i = 0; i < d.y_hat.size(); ++i) labels.push_back(std::to_string(i + 1));
  }
  d.labels = std::move(labels);
  d.validate();
  return d;
}

double shrinkage(double delta2, double v_i) noexcept {
  if (delta2 <= 0.0) return 0.0;
  return delta2 / (delta2 + v_i);
}

namespace {

// Weights w_i = 1/(V_i + delta2) = lambda_i / delta2 avoid dividing tiny
// lambda sums by tiny delta2 near the bottom of the grid.
template <typename Members>
ClusterStats compute_stats(const SurveyData& data, const Members& members, double delta2) {
  if (!(delta2 > 0.0)) throw DomainError("cluster_stats: delta2 must be > 0");
  ClusterStats s;
  double w_sum = 0.0;
  double wy_sum = 0.0;
  for (int i : members) {
    const auto u = static_cast<std::size_t>(i);
    const double w = 1.0 / (data.v[u] + delta2);
    const double lam = delta2 * w;
    s.lambda.push_back(lam);
    s.lambda_sum += lam;
    s.log_one_minus_lambda_sum += -std::log1p(delta2 / data.v[u]);
    w_sum += w;
    wy_sum += w * data.y_hat[u];
  }
  if (s.lambda.empty()) throw DomainError("cluster_stats: empty cluster");
  s.mu_hat = wy_sum / w_sum;
  s.nu_var = 1.0 / w_sum;
  for (int i : members) {
    const auto u = static_cast<std::size_t>(i);
    const double r = data.y_hat[u] - s.mu_hat;
    s.q += r * r / (data.v[u] + delta2);
  }
  return s;
}

struct MaskRange {
  ClusterMask mask;
  struct It {
    ClusterMask rest;
    int operator*() const { return __builtin_ctz(rest); }
    It& operator++() {
      rest &= rest - 1;
      return *this;
    }
    bool operator!=(const It& o) const { return rest != o.rest; }
  };
  It begin() const { return {mask}; }
  It end() const { return {0}; }
};

}  // namespace

namespace {

void require_same_size(const SurveyData& data, const Partition& p, const char* what) {
  if (p.size() != data.size()) {
    throw DomainError(std::string(what) + ": partition covers " + std::to_string(p.size()) +
                      " sources, data has " + std::to_string(data.size()));
  }
}

}  // namespace

ClusterStats cluster_stats(const SurveyData& data, std::span<const int> cluster, double delta2) {
  return compute_stats(data, cluster, delta2);
}

ClusterStats cluster_stats(const SurveyData& data, ClusterMask cluster, double delta2) {
  return compute_stats(data, MaskRange{cluster}, delta2);
}

ConditionalMoments conditional_moments(const SurveyData& data, const Partition& p, double delta2) {
  require_same_size(data, p, "conditional_moments");
  const int n = data.size();
  ConditionalMoments m;
  m.n = n;
  m.mean.assign(static_cast<std::size_t>(n), 0.0);
  m.cov.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < p.cluster_count(); ++k) {
    const auto members = p.members(k);
    const auto s = cluster_stats(data, std::span<const int>(members), delta2);
    for (std::size_t a = 0; a < members.size(); ++a) {
      const auto i = static_cast<std::size_t>(members[a]);
      const double li = s.lambda[a];
      m.mean[i] = li * data.y_hat[i] + (1.0 - li) * s.mu_hat;
      for (std::size_t b = 0; b < members.size(); ++b) {
        const auto j = static_cast<std::size_t>(members[b]);
        const double lj = s.lambda[b];
        double c = (1.0 - li) * (1.0 - lj) * s.nu_var;
        if (a == b) c += delta2 * (1.0 - li);
        m.cov[i * static_cast<std::size_t>(n) + j] = c;
      }
    }
  }
  return m;
}

void conditional_marginals(const SurveyData& data, const Partition& p, double delta2,
                           std::span<double> mean, std::span<double> var) {
  require_same_size(data, p, "conditional_marginals");
  if (!(delta2 > 0.0)) throw DomainError("conditional_marginals: delta2 must be > 0");
  if (mean.size() != data.v.size() || var.size() != data.v.size()) {
    throw DomainError("conditional_marginals: output spans must have L entries");
  }
  for (int k = 0; k < p.cluster_count(); ++k) {
    const ClusterMask mask = p.cluster_mask(k);
    double w_sum = 0.0;
    double wy_sum = 0.0;
    for (int i : MaskRange{mask}) {
      const auto u = static_cast<std::size_t>(i);
      const double w = 1.0 / (data.v[u] + delta2);
      w_sum += w;
      wy_sum += w * data.y_hat[u];
    }
    const double mu_hat = wy_sum / w_sum;
    const double nu_var = 1.0 / w_sum;
    for (int i : MaskRange{mask}) {
      const auto u = static_cast<std::size_t>(i);
      const double one_minus = data.v[u] / (data.v[u] + delta2);
      const double li = 1.0 - one_minus;
      mean[u] = li * data.y_hat[u] + one_minus * mu_hat;
      var[u] = delta2 * one_minus + one_minus * one_minus * nu_var;
    }
  }
}

double q_statistic(const SurveyData& data, const Partition& p, double delta2) {
  require_same_size(data, p, "q_statistic");
  double q = 0.0;
  for (int k = 0; k < p.cluster_count(); ++k) q += cluster_stats(data, p.cluster_mask(k), delta2).q;
  return q;
}

double log_inv_beta_prior(double delta2) {
  if (!(delta2 > 0.0)) throw DomainError("log_inv_beta_prior: delta2 must be > 0");
  return -std::log1p(delta2) - 0.5 * std::log(delta2);
}

double log_cluster_term(const SurveyData& data, ClusterMask cluster, double delta2) {
  if (cluster == 0) throw DomainError("log_cluster_term: empty cluster");
  if (!(delta2 > 0.0)) throw DomainError("log_cluster_term: delta2 must be > 0");
  double w_sum = 0.0;
  double wy_sum = 0.0;
  double log_one_minus = 0.0;
  for (int i : MaskRange{cluster}) {
    const auto u = static_cast<std::size_t>(i);
    const double w = 1.0 / (data.v[u] + delta2);
    w_sum += w;
    wy_sum += w * data.y_hat[u];
    log_one_minus -= std::log1p(delta2 / data.v[u]);
  }
  const double mu_hat = wy_sum / w_sum;
  double q = 0.0;
  for (int i : MaskRange{cluster}) {
    const auto u = static_cast<std::size_t>(i);
    const double r = data.y_hat[u] - mu_hat;
    q += r * r / (data.v[u] + delta2);
  }
  return -0.5 + 0.5 * log_one_minus - 0.5 * q;
}

double log_partition_likelihood(const SurveyData& data, const Partition& p, double delta2) {
  require_same_size(data, p, "log_partition_likelihood");
  double total = 0.0;
  for (int k = 0; k < p.cluster_count(); ++k) {
    total += log_cluster_term(data, p.cluster_mask(k), delta2);
  }
  return total;
}

double log_joint_kernel(const SurveyData& data, const Partition& p, double delta2,
                        double log_prior_g) {
  return log_inv_beta_prior(delta2) + log_prior_g + log_partition_likelihood(data, p, delta2);
}

}  // namespace upool
