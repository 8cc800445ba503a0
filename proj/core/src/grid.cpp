#include "upool/grid.hpp"

#include <cmath>
#include <numbers>

#include "upool/errors.hpp"

namespace upool {

DeltaGrid build_grid(std::size_t r, double scale) {
  if (r < 2) throw DomainError("build_grid: need at least 2 grid points");
  if (!std::isfinite(scale) || !(scale > 0.0)) {
    throw DomainError("build_grid: prior scale must be finite and > 0");
  }
  DeltaGrid grid;
  grid.scale = scale;
  grid.deltas2.resize(r);
  grid.log_prior_mass.assign(r, -std::log(static_cast<double>(r)));
  const double step = (std::numbers::pi / 2.0) / static_cast<double>(r);
  for (std::size_t j = 0; j < r; ++j) {
    const double theta = (static_cast<double>(j) + 0.5) * step;
    const double delta = scale * std::tan(theta);
    grid.deltas2[j] = delta * delta;
  }
  return grid;
}

}  // namespace upool
