#include <doctest.h>

#include <cmath>
#include <sstream>

#include "upool/errors.hpp"
#include "upool/io.hpp"

using namespace upool;

namespace {

ParsedInput parse(const std::string& text) {
  std::istringstream in(text);
  return parse_input(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 9999;
}

}  // namespace

TEST_CASE("logit transform") {
  const auto half = logit_transform(50, 100);
  CHECK(half.estimate == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(half.variance == doctest::Approx(0.04).epsilon(1e-15));
  const auto quarter = logit_transform(25, 100);
  CHECK(quarter.estimate == doctest::Approx(-1.0986122886681098).epsilon(1e-14));
  CHECK(quarter.variance == doctest::Approx(0.05333333333333333).epsilon(1e-14));
  const auto zero = logit_transform(0, 20);
  CHECK(zero.estimate == doctest::Approx(std::log(0.5 / 20.5)).epsilon(1e-14));
  CHECK(zero.variance == doctest::Approx(1 / 0.5 + 1 / 20.5).epsilon(1e-14));
  const auto all = logit_transform(20, 20);
  CHECK(all.estimate == doctest::Approx(-zero.estimate).epsilon(1e-14));
  CHECK_THROWS_AS(logit_transform(0, 0), DomainError);
  CHECK_THROWS_AS(logit_transform(5, 4), DomainError);
  CHECK_THROWS_AS(logit_transform(-1, 4), DomainError);
}

TEST_CASE("summary form") {
  const auto p = parse("label,estimate,se\nS1,0.254,0.014\n# comment\n\nS2, 0.361 , 0.028\n");
  CHECK(p.form == InputForm::kSummary);
  REQUIRE(p.data.size() == 2);
  CHECK(p.data.labels[0] == "S1");
  CHECK(p.data.y_hat[0] == 0.254);
  CHECK(p.data.v[0] == doctest::Approx(0.000196).epsilon(1e-15));
  CHECK(p.data.y_hat[1] == 0.361);
  CHECK(*p.records[1].se == 0.028);
}

TEST_CASE("binomial form") {
  const auto p = parse("Label,Cases,Total\nA,50,100\nB,0,20\n");
  CHECK(p.form == InputForm::kBinomial);
  CHECK(p.data.y_hat[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.data.v[0] == doctest::Approx(0.04).epsilon(1e-15));
  CHECK(p.data.y_hat[1] == doctest::Approx(std::log(0.5 / 20.5)));
  CHECK(*p.records[1].cases == 0);
  CHECK(*p.records[1].total == 20);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("label,estimate,se\nA,0.1,0.0\n") == 2);
  CHECK(error_line("label,estimate,se\nA,0.1,-1\n") == 2);
  CHECK(error_line("label,estimate,se\nA,0.1\n") == 2);
  CHECK(error_line("label,estimate,se\nA,0.1,0.02\nB,0.2,0.01,9\n") == 3);
  CHECK(error_line("label,estimate,se\nA,0.1,0.02\n,0.2,0.01\n") == 3);
  CHECK(error_line("label,cases,total\nA,5,4\n") == 2);
  CHECK(error_line("label,cases,total\nA,5,10\nB,0.2,0.01\n") == 3);
  CHECK(error_line("label,estimate,se\nA,x,0.1\n") == 2);
  CHECK(error_line("label,estimate\nA,0.1\n") == 1);
  CHECK(error_line("label,cases,total\nA,1,0\n") == 2);
}

TEST_CASE("empty input has no records") {
  CHECK_THROWS_WITH_AS(parse(""), "no records", ParseError);
  CHECK_THROWS_WITH_AS(parse("label,estimate,se\n"), doctest::Contains("no records"), ParseError);
}

TEST_CASE("missing file") {
  CHECK_THROWS_AS(parse_input_file("/nonexistent/input.csv"), ParseError);
}

TEST_CASE("config files") {
  RunConfig c;
  std::istringstream in(
      "# run\nr = 500\nb=100\nseed = 42\nformat = md\ndelta_scale = 0.01\nm = 1\n"
      "pool_all_mixing = single\niterations = 300\nburn_in = 100\n");
  apply_config(in, c);
  CHECK(c.r == 500);
  CHECK(c.b == 100);
  CHECK(c.seed == 42);
  CHECK(c.format == OutputFormat::kMarkdown);
  CHECK(c.delta_scale == 0.01);
  CHECK(c.dpm.m == 1.0);
  CHECK(c.pool_all_mixing == PoolAllMixing::kSingleCluster);
  CHECK(c.dpm.iterations == 300);
  CHECK_NOTHROW(c.validate());

  std::istringstream bad("r = 10\nbogus = 1\n");
  try {
    apply_config(bad, c);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  RunConfig tiny;
  tiny.r = 1;
  CHECK_THROWS_AS(tiny.validate(), DomainError);
  tiny.r = 2;
  tiny.b = 0;
  CHECK_THROWS_AS(tiny.validate(), DomainError);
}

TEST_CASE("scenario files") {
  std::istringstream in("name = shifted\ndelta_steps = 4\nreps = 7\nse1 = 0.06\nseed = 3\n");
  const auto s = parse_scenario(in);
  CHECK(s.name == "shifted");
  CHECK(s.delta_shift == doctest::Approx(0.0772));
  CHECK(s.reps == 7);
  CHECK(s.v1 == doctest::Approx(0.0036));
  CHECK(s.base_seed == 3);
  std::istringstream bad("reps = 0\n");
  CHECK_THROWS_AS(parse_scenario(bad), DomainError);
  std::istringstream junk("reps\n");
  CHECK_THROWS_AS(parse_scenario(junk), ParseError);
}

TEST_CASE("output format names") {
  CHECK(parse_output_format("JSON") == OutputFormat::kJson);
  CHECK(parse_output_format("markdown") == OutputFormat::kMarkdown);
  CHECK(to_string(OutputFormat::kCsv) == "csv");
  CHECK_THROWS_AS(parse_output_format("xml"), DomainError);
}
