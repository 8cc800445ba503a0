#include "upool/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "upool/errors.hpp"
#include "upool/rng.hpp"

namespace upool {

namespace {

constexpr std::uint64_t kDataStream = 0x64617461ULL;
constexpr std::uint64_t kDrawStream = 0x64726177ULL;

}  // namespace

void SimScenario::validate() const {
  if (reps < 1) throw DomainError("scenario: reps must be >= 1");
  if (!(v1 > 0.0) || !(v2 > 0.0) || !std::isfinite(v1) || !std::isfinite(v2)) {
    throw DomainError("scenario: variances must be finite and > 0");
  }
  if (!std::isfinite(psi1) || !std::isfinite(psi2) || !std::isfinite(delta_shift)) {
    throw DomainError("scenario: means must be finite");
  }
  if (r < 2) throw DomainError("scenario: r must be >= 2");
  if (b < 1) throw DomainError("scenario: b must be >= 1");
}

double sd_reduction(double post_sd, double obs_se) {
  if (!(obs_se > 0.0)) throw DomainError("sd_reduction: observed SE must be > 0");
  return 100.0 * (obs_se - post_sd) / obs_se;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median: empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

SurveyData generate_replicate(const SimScenario& s, int rep_index) {
  s.validate();
  if (rep_index < 0 || rep_index >= s.reps) {
    throw DomainError("generate_replicate: replicate index out of range");
  }
  auto rng = CounterRng::substream(derive_key(s.base_seed, kDataStream),
                                   static_cast<std::uint64_t>(rep_index));
  std::normal_distribution<double> normal;
  const auto truth = s.truth();
  const std::array<double, 3> v{s.v1, s.v2, s.v2};
  SurveyData d;
  d.labels = {"1", "2", "3"};
  for (std::size_t i = 0; i < 3; ++i) {
    d.y_hat.push_back(truth[i] + std::sqrt(v[i]) * normal(rng));
    d.v.push_back(v[i]);
  }
  return d;
}

SimReport run_scenario(const SimScenario& s) {
  s.validate();
  const auto space = std::make_shared<const PartitionSpace>(enumerate_partitions(3));
  const auto grid = build_grid(s.r, s.delta_scale);
  const auto G = space->size();
  const auto reps = static_cast<std::size_t>(s.reps);
  const auto truth = s.truth();

  std::vector<double> pg(reps * G);
  std::vector<double> means(reps * 3);
  std::vector<double> sds(reps * 3);
  std::vector<unsigned char> covered(reps * 3);

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(reps); ++rr) {
    const auto rep = static_cast<std::size_t>(rr);
    const auto data = generate_replicate(s, static_cast<int>(rep));
    const auto jp = evaluate_joint(data, space, grid);
    const auto draws = sample_mu(data, jp, s.b, derive_key(derive_key(s.base_seed, kDrawStream), rep));
    const auto table = summarize(data, jp, draws, 0.0);
    const auto probs = marginal_g(jp);
    std::copy(probs.begin(), probs.end(), pg.begin() + static_cast<std::ptrdiff_t>(rep * G));
    for (std::size_t i = 0; i < 3; ++i) {
      const auto& row = table.rows[i];
      means[rep * 3 + i] = row.posterior_mean;
      sds[rep * 3 + i] = row.posterior_sd;
      covered[rep * 3 + i] = row.lower <= truth[i] && truth[i] <= row.upper;
    }
  }

  SimReport report;
  report.scenario = s;
  report.truth = truth;
  std::vector<double> column(reps);
  for (std::size_t g = 0; g < G; ++g) {
    const Partition& p = (*space)[g];
    report.partition_notation.push_back(p.to_string());
    report.partition_labels.push_back(l3_label(p));
    for (std::size_t rep = 0; rep < reps; ++rep) column[rep] = pg[rep * G + g];
    report.median_pg.push_back(median(column));
  }
  const std::array<double, 3> obs_se{std::sqrt(s.v1), std::sqrt(s.v2), std::sqrt(s.v2)};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t rep = 0; rep < reps; ++rep) column[rep] = means[rep * 3 + i];
    report.median_mean[i] = median(column);
    std::vector<double> reductions(reps);
    for (std::size_t rep = 0; rep < reps; ++rep) {
      column[rep] = sds[rep * 3 + i];
      reductions[rep] = sd_reduction(sds[rep * 3 + i], obs_se[i]);
    }
    report.median_sd[i] = median(column);
    report.median_sd_reduction[i] = median(std::move(reductions));
    double hits = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) hits += covered[rep * 3 + i];
    const double c = hits / static_cast<double>(reps);
    report.coverage[i] = c;
    report.coverage_se[i] = std::sqrt(c * (1.0 - c) / static_cast<double>(reps));
  }
  return report;
}

}  // namespace upool
