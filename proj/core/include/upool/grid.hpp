#pragma once
// Equal-prior-mass grid for the between-source variance delta2.
//
// Under f(delta2) ∝ 1/((1 + delta2/s^2) sqrt(delta2)), delta is half-Cauchy
// with scale s, so theta = arctan(delta/s) is uniform on (0, pi/2). Cell j of
// R uses the midpoint theta_j = (j - 1/2)(pi/2)/R, delta2_j = (s tan theta_j)^2,
// and carries prior mass exactly 1/R. No range truncation is involved.
//
// s = 1 is the prior as written on the natural scale of the estimates. The
// default s = 0.001 places the prior on a per-mille scale, which suits
// proportions with standard errors around 0.01.

#include <cstddef>
#include <vector>

namespace upool {

inline constexpr std::size_t kDefaultGridSize = 2000;
inline constexpr double kDefaultDeltaScale = 0.001;

struct DeltaGrid {
  std::vector<double> deltas2;         // strictly increasing
  std::vector<double> log_prior_mass;  // log(1/R) each
  double scale = 1.0;

  std::size_t size() const noexcept { return deltas2.size(); }
};

// Throws DomainError for r < 2 or a non-positive / non-finite scale.
DeltaGrid build_grid(std::size_t r, double scale = kDefaultDeltaScale);

}  // namespace upool
