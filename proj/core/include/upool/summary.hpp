#pragma once

#include <optional>
#include <string>
#include <vector>

namespace upool {

struct SummaryRow {
  std::string label;
  double observed = 0.0;
  double posterior_mean = 0.0;
  double observed_se = 0.0;
  double posterior_sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct PartitionProbability {
  std::string notation;  // cluster-set notation, e.g. "{1,3}|{2}"
  int l3_label = 0;      // 1..5 when L = 3, else 0
  double probability = 0.0;
};

struct PoolAllRow {
  double mean = 0.0;
  double sd = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  std::vector<PartitionProbability> partitions;
  std::optional<PoolAllRow> pool_all;
};

// Sample quantile with linear interpolation between order statistics
// (Hyndman-Fan type 7). `sorted` must be non-empty and ascending.
double sorted_quantile(const std::vector<double>& sorted, double p);

}  // namespace upool
