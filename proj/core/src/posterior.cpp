#include "upool/posterior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "upool/errors.hpp"
#include "upool/model.hpp"
#include "upool/rng.hpp"

namespace upool {

double sorted_quantile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile: empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

namespace {

void check_cell(double score, std::size_t g, std::size_t j) {
  if (!std::isfinite(score)) {
    throw ComputationError("evaluate_joint: non-finite kernel at partition " +
                           std::to_string(g) + ", grid cell " + std::to_string(j));
  }
}

}  // namespace

JointGridPosterior evaluate_joint(const SurveyData& data, const PartitionSpace& space,
                                  const DeltaGrid& grid, const EvaluateOptions& options) {
  return evaluate_joint(data, std::make_shared<const PartitionSpace>(space), grid, options);
}

JointGridPosterior evaluate_joint(const SurveyData& data,
                                  std::shared_ptr<const PartitionSpace> space,
                                  const DeltaGrid& grid, const EvaluateOptions& options) {
  data.validate();
  if (!space || space->size() == 0) throw DomainError("evaluate_joint: empty partition space");
  if (space->sources() != data.size()) {
    throw DomainError("evaluate_joint: data has L = " + std::to_string(data.size()) +
                      " but the partition space has L = " + std::to_string(space->sources()));
  }
  const std::size_t G = space->size();
  const std::size_t R = grid.size();
  if (R == 0) throw DomainError("evaluate_joint: empty grid");
  if (G > options.max_cells / R) {
    throw DomainError("evaluate_joint: " + std::to_string(G) + " partitions x " +
                      std::to_string(R) + " grid points exceeds the cell budget of " +
                      std::to_string(options.max_cells) + "; use a smaller grid");
  }

  JointGridPosterior jp;
  jp.grid = grid;
  jp.space = space;
  jp.log_mass.assign(G * R, 0.0);
  const double log_prior_g = -std::log(static_cast<double>(G));
  const auto& parts = space->partitions();

  if (data.size() >= options.factorize_from) {
    // The kernel is a sum of per-cluster terms, so score every nonempty subset
    // once per grid point and assemble partitions from the cache.
    const std::size_t subsets = std::size_t{1} << data.size();
    std::vector<double> cache(subsets * R, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t m = 1; m < static_cast<std::ptrdiff_t>(subsets); ++m) {
      for (std::size_t j = 0; j < R; ++j) {
        cache[static_cast<std::size_t>(m) * R + j] =
            log_cluster_term(data, static_cast<ClusterMask>(m), grid.deltas2[j]);
      }
    }
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t gi = 0; gi < static_cast<std::ptrdiff_t>(G); ++gi) {
      const auto g = static_cast<std::size_t>(gi);
      const Partition& p = parts[g];
      double* row = &jp.log_mass[g * R];
      for (std::size_t j = 0; j < R; ++j) row[j] = log_prior_g + grid.log_prior_mass[j];
      for (int k = 0; k < p.cluster_count(); ++k) {
        const double* term = &cache[static_cast<std::size_t>(p.cluster_mask(k)) * R];
        for (std::size_t j = 0; j < R; ++j) row[j] += term[j];
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(R); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      for (std::size_t g = 0; g < G; ++g) {
        jp.log_mass[g * R + j] = log_prior_g + grid.log_prior_mass[j] +
                                 log_partition_likelihood(data, parts[g], grid.deltas2[j]);
      }
    }
  }

  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t j = 0; j < R; ++j) {
      const double s = jp.log_mass[g * R + j];
      check_cell(s, g, j);
      max_score = std::max(max_score, s);
    }
  }
  double sum = 0.0;
  for (double s : jp.log_mass) sum += std::exp(s - max_score);
  jp.log_evidence = max_score + std::log(sum);
  for (double& s : jp.log_mass) s -= jp.log_evidence;
  return jp;
}

std::vector<double> marginal_g(const JointGridPosterior& jp) {
  const std::size_t R = jp.cells();
  std::vector<double> out(jp.partitions(), 0.0);
  for (std::size_t g = 0; g < out.size(); ++g) {
    for (std::size_t j = 0; j < R; ++j) out[g] += std::exp(jp.log_mass[g * R + j]);
  }
  return out;
}

std::vector<double> marginal_delta2(const JointGridPosterior& jp) {
  const std::size_t R = jp.cells();
  std::vector<double> out(R, 0.0);
  for (std::size_t g = 0; g < jp.partitions(); ++g) {
    for (std::size_t j = 0; j < R; ++j) out[j] += std::exp(jp.log_mass[g * R + j]);
  }
  return out;
}

PosteriorDraws sample_mu(const SurveyData& data, const JointGridPosterior& jp, std::size_t b,
                         std::uint64_t seed) {
  if (b < 1) throw DomainError("sample_mu: need at least one draw");
  const int n = data.size();
  const std::size_t R = jp.cells();
  const auto& parts = jp.space->partitions();

  std::vector<double> cumulative(jp.log_mass.size());
  double acc = 0.0;
  for (std::size_t c = 0; c < cumulative.size(); ++c) {
    acc += std::exp(jp.log_mass[c]);
    cumulative[c] = acc;
  }

  PosteriorDraws out;
  out.b = b;
  out.n = n;
  out.seed = seed;
  out.mu.assign(b * static_cast<std::size_t>(n), 0.0);
  out.g_indices.resize(b);
  out.delta2_indices.resize(b);
  out.delta2_values.resize(b);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t dd = 0; dd < static_cast<std::ptrdiff_t>(b); ++dd) {
    const auto d = static_cast<std::size_t>(dd);
    auto rng = CounterRng::substream(seed, d);
    const double u = rng.uniform() * acc;
    auto cell = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    cell = std::min(cell, cumulative.size() - 1);
    const std::size_t g = cell / R;
    const std::size_t j = cell % R;
    const double delta2 = jp.grid.deltas2[j];
    out.g_indices[d] = g;
    out.delta2_indices[d] = j;
    out.delta2_values[d] = delta2;

    std::normal_distribution<double> normal;
    const Partition& p = parts[g];
    double* row = &out.mu[d * static_cast<std::size_t>(n)];
    for (int k = 0; k < p.cluster_count(); ++k) {
      const auto members = p.members(k);
      const auto s = cluster_stats(data, std::span<const int>(members), delta2);
      const double nu = s.mu_hat + std::sqrt(s.nu_var) * normal(rng);
      for (std::size_t a = 0; a < members.size(); ++a) {
        const auto i = static_cast<std::size_t>(members[a]);
        const double lam = s.lambda[a];
        const double cond_mean = lam * data.y_hat[i] + (1.0 - lam) * nu;
        row[i] = cond_mean + std::sqrt(lam * data.v[i]) * normal(rng);
      }
    }
  }
  return out;
}

MixtureMoments exact_mixture_moments(const SurveyData& data, const JointGridPosterior& jp) {
  const auto n = static_cast<std::size_t>(data.size());
  const std::size_t G = jp.partitions();
  const std::size_t R = jp.cells();
  const auto& parts = jp.space->partitions();

  // Moments are accumulated about y_hat to limit cancellation; per-partition
  // partial sums are reduced in order so the result is thread-count free.
  std::vector<double> first(G * n, 0.0);
  std::vector<double> second(G * n, 0.0);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t gi = 0; gi < static_cast<std::ptrdiff_t>(G); ++gi) {
    const auto g = static_cast<std::size_t>(gi);
    std::vector<double> mean(n);
    std::vector<double> var(n);
    for (std::size_t j = 0; j < R; ++j) {
      const double w = std::exp(jp.log_mass[g * R + j]);
      if (w == 0.0) continue;
      conditional_marginals(data, parts[g], jp.grid.deltas2[j], mean, var);
      for (std::size_t i = 0; i < n; ++i) {
        const double c = mean[i] - data.y_hat[i];
        first[g * n + i] += w * c;
        second[g * n + i] += w * (var[i] + c * c);
      }
    }
  }
  MixtureMoments out;
  out.mean.assign(n, 0.0);
  out.sd.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      m1 += first[g * n + i];
      m2 += second[g * n + i];
    }
    out.mean[i] = data.y_hat[i] + m1;
    out.sd[i] = std::sqrt(std::max(0.0, m2 - m1 * m1));
  }
  return out;
}

SummaryTable summarize(const SurveyData& data, const JointGridPosterior& jp,
                       const PosteriorDraws& draws, double threshold) {
  const auto moments = exact_mixture_moments(data, jp);
  SummaryTable table;
  std::vector<double> column(draws.b);
  for (int i = 0; i < data.size(); ++i) {
    const auto u = static_cast<std::size_t>(i);
    for (std::size_t d = 0; d < draws.b; ++d) column[d] = draws.mu_at(d, i);
    std::sort(column.begin(), column.end());
    SummaryRow row;
    row.label = data.labels.empty() ? std::to_string(i + 1) : data.labels[u];
    row.observed = data.y_hat[u];
    row.posterior_mean = moments.mean[u];
    row.observed_se = std::sqrt(data.v[u]);
    row.posterior_sd = moments.sd[u];
    row.lower = sorted_quantile(column, 0.025);
    row.upper = sorted_quantile(column, 0.975);
    table.rows.push_back(std::move(row));
  }
  const auto pg = marginal_g(jp);
  for (std::size_t g = 0; g < pg.size(); ++g) {
    if (pg[g] < threshold) continue;
    const Partition& p = (*jp.space)[g];
    table.partitions.push_back({p.to_string(), p.size() == 3 ? l3_label(p) : 0, pg[g]});
  }
  return table;
}

}  // namespace upool
