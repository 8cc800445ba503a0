#include <doctest.h>

#include <cmath>
#include <numbers>

#include "upool/errors.hpp"
#include "upool/grid.hpp"

using namespace upool;

TEST_CASE("grid layout") {
  const auto g = build_grid(4, 1.0);
  REQUIRE(g.size() == 4);
  // theta = (j - 1/2) * pi / 8
  for (std::size_t j = 0; j < 4; ++j) {
    const double theta = (static_cast<double>(j) + 0.5) * std::numbers::pi / 8.0;
    CHECK(g.deltas2[j] == doctest::Approx(std::pow(std::tan(theta), 2)).epsilon(1e-14));
    CHECK(g.log_prior_mass[j] == doctest::Approx(std::log(0.25)).epsilon(1e-15));
  }
  for (std::size_t j = 1; j < 4; ++j) CHECK(g.deltas2[j] > g.deltas2[j - 1]);
}

TEST_CASE("grid scale multiplies delta") {
  const auto a = build_grid(50, 1.0);
  const auto b = build_grid(50, 0.001);
  CHECK(b.scale == 0.001);
  for (std::size_t j = 0; j < 50; ++j) CHECK(b.deltas2[j] == doctest::Approx(a.deltas2[j] * 1e-6).epsilon(1e-13));
}

TEST_CASE("prior masses sum to one") {
  for (std::size_t r : {2u, 10u, 2000u}) {
    const auto g = build_grid(r, 1.0);
    double total = 0.0;
    for (double lm : g.log_prior_mass) total += std::exp(lm);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("grid reproduces a prior expectation") {
  // E[delta2 1{delta2 < 1}] under the unit-scale prior is (2 - pi/2)/pi.
  const auto g = build_grid(1000, 1.0);
  double mean = 0.0;
  for (double d2 : g.deltas2) mean += d2 < 1.0 ? d2 / 1000.0 : 0.0;
  CHECK(mean == doctest::Approx((2.0 - std::numbers::pi / 2.0) / std::numbers::pi).epsilon(1e-3));
}

TEST_CASE("grid argument checks") {
  CHECK_THROWS_AS(build_grid(1), DomainError);
  CHECK_THROWS_AS(build_grid(10, 0.0), DomainError);
  CHECK_THROWS_AS(build_grid(10, -1.0), DomainError);
  CHECK_THROWS_AS(build_grid(10, INFINITY), DomainError);
}
