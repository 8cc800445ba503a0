#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "upool/grid.hpp"
#include "upool/model.hpp"
#include "upool/posterior.hpp"

using namespace upool;

TEST_CASE("inverse beta prior integrates to pi") {
  auto f = [](double x) { return std::exp(log_inv_beta_prior(x)); };
  // Split at 1: the integrable singularity at 0 and the tail.
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> tail;
  const double total = near.integrate(f, 0.0, 1.0) + tail.integrate(f, 1.0, INFINITY);
  CHECK(std::abs(total - std::numbers::pi) < 1e-6);
}

TEST_CASE("grid prior masses sum to one") {
  for (std::size_t r : {2u, 7u, 100u, 2000u, 10000u}) {
    for (double s : {1.0, 0.001}) {
      const auto g = build_grid(r, s);
      double total = 0.0;
      for (double lm : g.log_prior_mass) total += std::exp(lm);
      CHECK(std::abs(total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("grid cells carry equal prior probability") {
  // Prior CDF of delta2 at scale s is (2/pi) atan(sqrt(delta2)/s); each grid
  // point sits at the middle of its 1/R slice.
  const std::size_t r = 500;
  for (double s : {1.0, 0.001}) {
    const auto g = build_grid(r, s);
    for (std::size_t j = 0; j < r; ++j) {
      const double cdf = 2.0 / std::numbers::pi * std::atan(std::sqrt(g.deltas2[j]) / s);
      CHECK(std::abs(cdf - (static_cast<double>(j) + 0.5) / static_cast<double>(r)) < 1e-12);
    }
  }
}

TEST_CASE("posterior masses normalize") {
  const auto d = SurveyData::from_se({0.294, 0.257, 0.179}, {0.089, 0.018, 0.009});
  const auto jp = evaluate_joint(d, enumerate_partitions(3), build_grid(2000));
  double total = 0.0;
  for (double lm : jp.log_mass) total += std::exp(lm);
  CHECK(std::abs(total - 1.0) < 1e-10);
  double pg = 0.0;
  for (double x : marginal_g(jp)) pg += x;
  double pd = 0.0;
  for (double x : marginal_delta2(jp)) pd += x;
  CHECK(std::abs(pg - 1.0) < 1e-10);
  CHECK(std::abs(pd - 1.0) < 1e-10);
}
