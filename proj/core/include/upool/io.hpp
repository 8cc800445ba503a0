#pragma once
// Input ingestion and flat key-value configuration files.
//
// Input files are comma-delimited with a header of either
//   label,estimate,se        (summary form)
//   label,cases,total        (binomial form, analysed on the logit scale)
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "upool/dpm.hpp"
#include "upool/grid.hpp"
#include "upool/pool_all.hpp"
#include "upool/posterior.hpp"
#include "upool/simulation.hpp"
#include "upool/survey_data.hpp"

namespace upool {

enum class InputForm { kSummary, kBinomial };

struct InputRecord {
  std::string label;
  std::optional<double> estimate;
  std::optional<double> se;
  std::optional<std::int64_t> cases;
  std::optional<std::int64_t> total;
};

struct ParsedInput {
  InputForm form = InputForm::kSummary;
  std::vector<InputRecord> records;
  SurveyData data;
};

struct LogitEstimate {
  double estimate = 0.0;
  double variance = 0.0;
};

// Empirical logit with delta-method variance 1/y + 1/(n - y). When y is 0 or
// n, y is replaced by y + 1/2 and n by n + 1. Throws DomainError for n < 1 or
// y outside [0, n].
LogitEstimate logit_transform(std::int64_t cases, std::int64_t total);

// Throws ParseError (with the offending line) on a bad header, mixed forms,
// missing or non-numeric fields, se <= 0, y > n, or no records.
ParsedInput parse_input(std::istream& in);
ParsedInput parse_input_file(const std::filesystem::path& path);

enum class OutputFormat { kJson, kCsv, kMarkdown };

OutputFormat parse_output_format(const std::string& name);
std::string to_string(OutputFormat format);

// "joint" or "single".
PoolAllMixing parse_pool_all_mixing(const std::string& name);
std::string to_string(PoolAllMixing mixing);

struct RunConfig {
  std::size_t r = kDefaultGridSize;
  std::size_t b = kDefaultDraws;
  std::uint64_t seed = 1;
  double delta_scale = kDefaultDeltaScale;
  double threshold = kDefaultDisplayThreshold;
  int max_sources = kDefaultMaxSources;
  OutputFormat format = OutputFormat::kJson;
  PoolAllMixing pool_all_mixing = PoolAllMixing::kJointMarginal;
  DpmConfig dpm;

  // Throws DomainError unless r >= 2, b >= 1, delta_scale > 0 and
  // 0 <= threshold <= 1.
  void validate() const;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys raise
// ParseError. Keys: r, b, seed, delta_scale, threshold, max_l, format,
// pool_all_mixing, m, eta_b, s_b, phi1, phi2, iterations, burn_in, thin.
void apply_config(std::istream& in, RunConfig& config);

// Scenario keys: name, psi1, psi2, v1, v2, se1, se2, delta (absolute shift),
// delta_steps (multiples of kSeparationStep), reps, r, b, seed, delta_scale.
SimScenario parse_scenario(std::istream& in);
SimScenario parse_scenario_file(const std::filesystem::path& path);

}  // namespace upool
