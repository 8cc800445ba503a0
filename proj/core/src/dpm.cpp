#include "upool/dpm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "upool/errors.hpp"
#include "upool/rng.hpp"

namespace upool {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double r = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * var) + r * r / var);
}

void require_finite_positive(double x, const char* name) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError(std::string("dpm: ") + name + " must be finite and > 0");
  }
}

}  // namespace

DpmHyperparameters resolve_hyperparameters(const SurveyData& data, const DpmConfig& cfg) {
  data.validate();
  const auto n = data.y_hat.size();
  double prec = 0.0;
  double prec_y = 0.0;
  double mean_v = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    prec += 1.0 / data.v[i];
    prec_y += data.y_hat[i] / data.v[i];
    mean_v += data.v[i] / static_cast<double>(n);
  }
  const auto [lo, hi] = std::minmax_element(data.y_hat.begin(), data.y_hat.end());
  const double range = *hi - *lo;
  double sample_var = 0.0;
  if (n > 1) {
    double mean = 0.0;
    for (double y : data.y_hat) mean += y / static_cast<double>(n);
    for (double y : data.y_hat) sample_var += (y - mean) * (y - mean);
    sample_var /= static_cast<double>(n - 1);
  }

  DpmHyperparameters h;
  h.m = cfg.m;
  h.eta_b = cfg.eta_b.value_or(prec_y / prec);
  h.s_b = cfg.s_b.value_or(range > 0.0 ? range * range : mean_v);
  h.phi1 = cfg.phi1.value_or(2.0);
  h.phi2 = cfg.phi2.value_or(2.0 * (sample_var > 0.0 ? sample_var : mean_v));

  require_finite_positive(h.m, "M");
  if (!std::isfinite(h.eta_b)) throw DomainError("dpm: eta_b must be finite");
  require_finite_positive(h.s_b, "S_b");
  require_finite_positive(h.phi1, "phi1");
  require_finite_positive(h.phi2, "phi2");
  return h;
}

double dpm_partition_prior(const Partition& p, double m) {
  require_finite_positive(m, "M");
  double log_p = static_cast<double>(p.cluster_count() - 1) * std::log(m);
  for (int k = 0; k < p.cluster_count(); ++k) {
    log_p += std::lgamma(static_cast<double>(std::popcount(p.cluster_mask(k))));
  }
  for (int i = 1; i < p.size(); ++i) log_p -= std::log(m + i);
  return std::exp(log_p);
}

std::vector<double> dpm_cluster_count_prior(int sources, double m) {
  const auto space = enumerate_partitions(sources);
  std::vector<double> out(static_cast<std::size_t>(sources), 0.0);
  for (const auto& p : space) {
    out[static_cast<std::size_t>(p.cluster_count() - 1)] += dpm_partition_prior(p, m);
  }
  return out;
}

double dpm_log_cluster_marginal(const SurveyData& data, const std::vector<int>& members,
                                double eta, double tau2) {
  // Chain rule over members: each estimate's predictive given the earlier ones.
  double prec = 1.0 / tau2;
  double mean = eta;
  double total = 0.0;
  for (int i : members) {
    const auto u = static_cast<std::size_t>(i);
    total += log_normal_pdf(data.y_hat[u], mean, 1.0 / prec + data.v[u]);
    const double next = prec + 1.0 / data.v[u];
    mean = (mean * prec + data.y_hat[u] / data.v[u]) / next;
    prec = next;
  }
  return total;
}

DpmExact dpm_exact(const SurveyData& data, double eta, double tau2, double m) {
  data.validate();
  if (data.size() > kDpmExactMaxSources) {
    throw DomainError("dpm_exact: enumeration limited to L <= " +
                      std::to_string(kDpmExactMaxSources));
  }
  require_finite_positive(tau2, "tau2");
  DpmExact out{enumerate_partitions(data.size()), {}, {}, {}};
  const std::size_t G = out.space.size();
  std::vector<double> logp(G);
  for (std::size_t g = 0; g < G; ++g) {
    const Partition& p = out.space[g];
    double lp = std::log(dpm_partition_prior(p, m));
    for (int k = 0; k < p.cluster_count(); ++k) {
      lp += dpm_log_cluster_marginal(data, p.members(k), eta, tau2);
    }
    logp[g] = lp;
  }
  const double top = *std::max_element(logp.begin(), logp.end());
  double sum = 0.0;
  for (double& x : logp) sum += (x = std::exp(x - top));
  for (double& x : logp) x /= sum;
  out.probabilities = logp;

  const auto n = static_cast<std::size_t>(data.size());
  std::vector<double> m1(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (std::size_t g = 0; g < G; ++g) {
    const Partition& p = out.space[g];
    for (int k = 0; k < p.cluster_count(); ++k) {
      const auto members = p.members(k);
      double prec = 1.0 / tau2;
      double num = eta / tau2;
      for (int i : members) {
        prec += 1.0 / data.v[static_cast<std::size_t>(i)];
        num += data.y_hat[static_cast<std::size_t>(i)] / data.v[static_cast<std::size_t>(i)];
      }
      const double cm = num / prec;
      for (int i : members) {
        m1[static_cast<std::size_t>(i)] += out.probabilities[g] * cm;
        m2[static_cast<std::size_t>(i)] += out.probabilities[g] * (1.0 / prec + cm * cm);
      }
    }
  }
  out.mean = m1;
  out.sd.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.sd[i] = std::sqrt(std::max(0.0, m2[i] - m1[i] * m1[i]));
  return out;
}

DpmDraws dpm_gibbs(const SurveyData& data, const DpmConfig& cfg) {
  const auto hyper = resolve_hyperparameters(data, cfg);
  if (cfg.iterations <= cfg.burn_in || cfg.burn_in < 0) {
    throw DomainError("dpm_gibbs: iterations must exceed burn_in");
  }
  if (cfg.thin < 1) throw DomainError("dpm_gibbs: thin must be >= 1");
  if (cfg.fixed_eta && !std::isfinite(*cfg.fixed_eta)) {
    throw DomainError("dpm_gibbs: fixed eta must be finite");
  }
  if (cfg.fixed_tau2) require_finite_positive(*cfg.fixed_tau2, "fixed tau2");

  const int n = data.size();
  const auto un = static_cast<std::size_t>(n);
  auto rng = CounterRng::substream(cfg.seed, 0);
  std::normal_distribution<double> normal;

  double eta = cfg.fixed_eta.value_or(hyper.eta_b);
  double tau2 = cfg.fixed_tau2.value_or(hyper.phi2 / hyper.phi1);

  // Cluster state: member count and precision-weighted sums.
  std::vector<int> label(un);
  std::vector<int> count;
  std::vector<double> sum_prec;
  std::vector<double> sum_prec_y;
  for (int i = 0; i < n; ++i) {
    label[static_cast<std::size_t>(i)] = i;
    count.push_back(1);
    sum_prec.push_back(1.0 / data.v[static_cast<std::size_t>(i)]);
    sum_prec_y.push_back(data.y_hat[static_cast<std::size_t>(i)] / data.v[static_cast<std::size_t>(i)]);
  }

  DpmDraws out;
  out.n = n;
  out.hyper = hyper;
  out.seed = cfg.seed;
  std::vector<double> logw;
  std::vector<double> theta;

  for (int it = 0; it < cfg.iterations; ++it) {
    for (int i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      const double y = data.y_hat[u];
      const double v = data.v[u];
      // Remove i; an emptied cluster is replaced by the last one.
      int c = label[u];
      --count[static_cast<std::size_t>(c)];
      sum_prec[static_cast<std::size_t>(c)] -= 1.0 / v;
      sum_prec_y[static_cast<std::size_t>(c)] -= y / v;
      if (count[static_cast<std::size_t>(c)] == 0) {
        const int last = static_cast<int>(count.size()) - 1;
        if (c != last) {
          count[static_cast<std::size_t>(c)] = count.back();
          sum_prec[static_cast<std::size_t>(c)] = sum_prec.back();
          sum_prec_y[static_cast<std::size_t>(c)] = sum_prec_y.back();
          for (auto& l : label) {
            if (l == last) l = c;
          }
        }
        count.pop_back();
        sum_prec.pop_back();
        sum_prec_y.pop_back();
      } else if (count[static_cast<std::size_t>(c)] > 0) {
        // Recompute from members to avoid drift from repeated subtraction.
        double sp = 0.0;
        double spy = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j != i && label[static_cast<std::size_t>(j)] == c) {
            sp += 1.0 / data.v[static_cast<std::size_t>(j)];
            spy += data.y_hat[static_cast<std::size_t>(j)] / data.v[static_cast<std::size_t>(j)];
          }
        }
        sum_prec[static_cast<std::size_t>(c)] = sp;
        sum_prec_y[static_cast<std::size_t>(c)] = spy;
      }

      const std::size_t K = count.size();
      logw.assign(K + 1, 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        const double prec = 1.0 / tau2 + sum_prec[k];
        const double mean = (eta / tau2 + sum_prec_y[k]) / prec;
        logw[k] = std::log(static_cast<double>(count[k])) + log_normal_pdf(y, mean, 1.0 / prec + v);
      }
      logw[K] = std::log(hyper.m) + log_normal_pdf(y, eta, tau2 + v);
      const double top = *std::max_element(logw.begin(), logw.end());
      double total = 0.0;
      for (double& w : logw) total += (w = std::exp(w - top));
      double pick = rng.uniform() * total;
      std::size_t chosen = 0;
      while (chosen < K && pick >= logw[chosen]) pick -= logw[chosen++];

      if (chosen == K) {
        count.push_back(0);
        sum_prec.push_back(0.0);
        sum_prec_y.push_back(0.0);
      }
      label[u] = static_cast<int>(chosen);
      ++count[chosen];
      sum_prec[chosen] += 1.0 / v;
      sum_prec_y[chosen] += y / v;
    }

    // Cluster means given labels, then the base-measure hyperparameters.
    const std::size_t K = count.size();
    theta.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      const double prec = 1.0 / tau2 + sum_prec[k];
      const double mean = (eta / tau2 + sum_prec_y[k]) / prec;
      theta[k] = mean + normal(rng) / std::sqrt(prec);
    }
    if (!cfg.fixed_eta) {
      double sum_theta = 0.0;
      for (double t : theta) sum_theta += t;
      const double prec = 1.0 / hyper.s_b + static_cast<double>(K) / tau2;
      const double mean = (hyper.eta_b / hyper.s_b + sum_theta / tau2) / prec;
      eta = mean + normal(rng) / std::sqrt(prec);
    }
    if (!cfg.fixed_tau2) {
      double ss = 0.0;
      for (double t : theta) ss += (t - eta) * (t - eta);
      const double shape = 0.5 * hyper.phi1 + 0.5 * static_cast<double>(K);
      const double rate = 0.5 * hyper.phi2 + 0.5 * ss;
      std::gamma_distribution<double> gamma(shape, 1.0 / rate);
      tau2 = 1.0 / gamma(rng);
    }
    if (!std::isfinite(eta) || !std::isfinite(tau2) || !(tau2 > 0.0)) {
      throw ComputationError("dpm_gibbs: hyperparameter update produced a non-finite value");
    }

    if (it >= cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0) {
      // Store labels as a canonical restricted growth string.
      std::vector<int> relabel(K, -1);
      int next = 0;
      for (int i = 0; i < n; ++i) {
        int& r = relabel[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])];
        if (r < 0) r = next++;
        out.assignments.push_back(r);
        out.mu.push_back(theta[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])]);
      }
      out.eta.push_back(eta);
      out.tau2.push_back(tau2);
      ++out.retained;
    }
  }

  std::vector<double> column(out.retained);
  for (int i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    double mean = 0.0;
    for (std::size_t d = 0; d < out.retained; ++d) {
      column[d] = out.mu[d * un + u];
      mean += column[d];
    }
    mean /= static_cast<double>(out.retained);
    double ss = 0.0;
    for (double x : column) ss += (x - mean) * (x - mean);
    std::sort(column.begin(), column.end());
    SummaryRow row;
    row.label = data.labels.empty() ? std::to_string(i + 1) : data.labels[u];
    row.observed = data.y_hat[u];
    row.posterior_mean = mean;
    row.observed_se = std::sqrt(data.v[u]);
    row.posterior_sd = out.retained > 1 ? std::sqrt(ss / static_cast<double>(out.retained - 1)) : 0.0;
    row.lower = sorted_quantile(column, 0.025);
    row.upper = sorted_quantile(column, 0.975);
    out.rows.push_back(std::move(row));
  }

  std::map<std::vector<int>, std::size_t> freq;
  for (std::size_t d = 0; d < out.retained; ++d) {
    const auto first = out.assignments.begin() + static_cast<std::ptrdiff_t>(d * un);
    ++freq[std::vector<int>(first, first + n)];
  }
  for (const auto& [assignment, c] : freq) {
    const auto p = Partition::from_assignment(assignment);
    out.partition_frequencies.push_back(
        {p.to_string(), n == 3 ? l3_label(p) : 0,
         static_cast<double>(c) / static_cast<double>(out.retained)});
  }
  return out;
}

}  // namespace upool
