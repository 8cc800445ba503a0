#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace upool {

// Point estimates and known sampling variances from L sources.
struct SurveyData {
  std::vector<std::string> labels;
  std::vector<double> y_hat;
  std::vector<double> v;

  int size() const noexcept { return static_cast<int>(y_hat.size()); }

  // Throws DomainError unless L >= 1, sizes agree, every estimate is finite
  // and every variance is finite and > 0.
  void validate() const;

  // Builds data from estimates and standard errors (v = se^2); labels default
  // to "1".."L".
  static SurveyData from_se(std::vector<double> y_hat, const std::vector<double>& se,
                            std::vector<std::string> labels = {});
};

}  // namespace upool
