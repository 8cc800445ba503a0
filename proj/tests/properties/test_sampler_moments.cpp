#include <doctest.h>

#include <cmath>
#include <memory>

#include "upool/model.hpp"
#include "upool/posterior.hpp"

using namespace upool;

namespace {

constexpr std::size_t kDraws = 200000;

// A posterior concentrated on one (partition, delta2) cell.
JointGridPosterior single_cell(const Partition& p, double d2) {
  JointGridPosterior jp;
  jp.grid.deltas2 = {d2};
  jp.grid.log_prior_mass = {0.0};
  jp.space = std::make_shared<const PartitionSpace>(PartitionSpace::restricted(p.size(), {p}));
  jp.log_mass = {0.0};
  return jp;
}

}  // namespace

TEST_CASE("two-stage draw variance identity") {
  // lambda_i V_i = delta2 (1 - lambda_i), so the draw's conditional variance
  // lambda_i V_i plus (1 - lambda_i)^2 nu_var reproduces the closed form.
  for (double d2 : {1e-6, 0.0004, 0.3}) {
    for (double v : {1e-4, 0.01, 2.0}) {
      const double lam = shrinkage(d2, v);
      CHECK(std::abs(lam * v - d2 * (1 - lam)) <= 1e-15 * std::max(1.0, v));
    }
  }
}

TEST_CASE("draws at a fixed cell match the conditional moments") {
  const auto d = SurveyData::from_se({0.294, 0.257, 0.179, 0.22}, {0.036, 0.018, 0.009, 0.02});
  const auto p = parse_partition("{1,2,4}|{3}");
  const double d2 = 0.0004;
  const auto draws = sample_mu(d, single_cell(p, d2), kDraws, 77);
  const auto m = conditional_moments(d, p, d2);
  const int l = d.size();
  const double n = static_cast<double>(kDraws);
  std::vector<double> mean(static_cast<std::size_t>(l), 0.0);
  for (std::size_t k = 0; k < kDraws; ++k) {
    for (int i = 0; i < l; ++i) mean[static_cast<std::size_t>(i)] += draws.mu_at(k, i) / n;
  }
  for (int i = 0; i < l; ++i) {
    const auto u = static_cast<std::size_t>(i);
    CHECK(std::abs(mean[u] - m.mean[u]) < 4.0 * std::sqrt(m.cov_at(i, i) / n));
    for (int j = i; j < l; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < kDraws; ++k) {
        c += (draws.mu_at(k, i) - m.mean[u]) * (draws.mu_at(k, j) - m.mean[static_cast<std::size_t>(j)]);
      }
      c /= n;
      // Normal-theory standard error of a covariance estimate.
      const double se = std::sqrt((m.cov_at(i, i) * m.cov_at(j, j) + m.cov_at(i, j) * m.cov_at(i, j)) / n);
      CHECK(std::abs(c - m.cov_at(i, j)) < 4.0 * se);
    }
  }
}

TEST_CASE("draws over the full posterior match the mixture moments") {
  const auto d = SurveyData::from_se({0.254, 0.361, 0.359}, {0.014, 0.028, 0.028});
  const auto jp = evaluate_joint(d, enumerate_partitions(3), build_grid(2000));
  const auto draws = sample_mu(d, jp, kDraws, 2024);
  const auto m = exact_mixture_moments(d, jp);
  const double n = static_cast<double>(kDraws);
  for (int i = 0; i < 3; ++i) {
    const auto u = static_cast<std::size_t>(i);
    double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    for (std::size_t k = 0; k < kDraws; ++k) {
      const double x = draws.mu_at(k, i) - m.mean[u];
      s1 += x;
      s2 += x * x;
      s4 += x * x * x * x;
    }
    const double var = m.sd[u] * m.sd[u];
    CHECK(std::abs(s1 / n) < 4.0 * m.sd[u] / std::sqrt(n));
    // Variance SE from the sample fourth moment (the mixture is not normal).
    const double var_se = std::sqrt((s4 / n - var * var) / n);
    CHECK(std::abs(s2 / n - var) < 4.0 * var_se);
  }
}
