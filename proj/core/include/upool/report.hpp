#pragma once
// Report documents and their JSON / CSV / markdown renderings.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "upool/dpm.hpp"
#include "upool/io.hpp"
#include "upool/simulation.hpp"
#include "upool/summary.hpp"

namespace upool {

inline constexpr const char* kReportVersion = "upool-report/1";

struct DpmSection {
  DpmHyperparameters hyper;
  int iterations = 0;
  int burn_in = 0;
  int thin = 1;
  std::uint64_t retained = 0;
  std::vector<SummaryRow> rows;
  std::vector<PartitionProbability> partitions;
};

struct ReportDocument {
  std::string command;  // pool, pool-all or dpm
  InputForm form = InputForm::kSummary;
  std::vector<InputRecord> records;
  SurveyData data;  // analysis scale
  RunConfig config;
  SummaryTable summary;  // rows/partitions empty unless command == pool
  std::optional<DpmSection> dpm;
};

// Serializes with a fixed key order; doubles use shortest round-trip form, so
// to_json(report_from_json(to_json(doc))) == to_json(doc).
std::string to_json(const ReportDocument& doc);
// Throws ParseError on malformed or incomplete documents.
ReportDocument report_from_json(const std::string& text);

std::string to_csv(const ReportDocument& doc);
std::string to_markdown(const ReportDocument& doc);
std::string render(const ReportDocument& doc, OutputFormat format);

std::string to_json(const SimReport& report);
std::string to_csv(const SimReport& report);
std::string to_markdown(const SimReport& report);
std::string render(const SimReport& report, OutputFormat format);

}  // namespace upool
