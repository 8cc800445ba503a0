#pragma once
// Replicated sampling study of uncertain pooling with three sources:
//
//   y_1 ~ N(psi1, V1),  y_2 ~ N(psi1, V2),  y_3 ~ N(psi2 + shift, V2)

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "upool/grid.hpp"
#include "upool/posterior.hpp"
#include "upool/survey_data.hpp"

namespace upool {

// Separation unit for the standard scenarios: shift = k * 0.0193, k in {0, 4, 8}.
inline constexpr double kSeparationStep = 0.0193;

struct SimScenario {
  std::string name = "scenario";
  double psi1 = 0.276;
  double psi2 = 0.179;
  double v1 = 0.06 * 0.06;
  double v2 = 0.006 * 0.006;
  double delta_shift = 0.0;
  int reps = 500;
  std::size_t r = kDefaultGridSize;
  std::size_t b = kDefaultDraws;
  double delta_scale = kDefaultDeltaScale;
  std::uint64_t base_seed = 1;

  // Throws DomainError unless reps >= 1, variances > 0, r >= 2 and b >= 1.
  void validate() const;
  std::array<double, 3> truth() const { return {psi1, psi1, psi2 + delta_shift}; }
};

struct SimReport {
  SimScenario scenario;
  std::array<double, 3> truth{};
  std::vector<std::string> partition_notation;  // canonical order
  std::vector<int> partition_labels;            // 1..5 display labels
  std::vector<double> median_pg;
  std::array<double, 3> median_mean{};
  std::array<double, 3> median_sd{};
  std::array<double, 3> coverage{};
  std::array<double, 3> coverage_se{};  // binomial sqrt(c(1-c)/reps)
  std::array<double, 3> median_sd_reduction{};
};

// Replicate data from the substream (base_seed, rep_index). Throws
// DomainError when rep_index is outside [0, reps).
SurveyData generate_replicate(const SimScenario& s, int rep_index);

// Runs the full pipeline on every replicate. Replicates run in parallel and
// the report does not depend on execution order.
SimReport run_scenario(const SimScenario& s);

// 100 (obs_se - post_sd) / obs_se; negative when pooling widens.
// Throws DomainError for obs_se <= 0.
double sd_reduction(double post_sd, double obs_se);

double median(std::vector<double> values);

}  // namespace upool
