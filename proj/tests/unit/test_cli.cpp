#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "upool/cli.hpp"
#include "upool/report.hpp"

using namespace upool;

namespace {

const std::string kData = UPOOL_TEST_DATA_DIR;

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << content;
  return path.string();
}

}  // namespace

TEST_CASE("partitions lists five lines for three sources") {
  const auto r = run({"partitions", "--l", "3"});
  CHECK(r.code == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 5);
  CHECK(r.out.find("{1}|{2,3}\tg=4") != std::string::npos);
  const auto four = run({"partitions", "--l", "4"});
  CHECK(std::count(four.out.begin(), four.out.end(), '\n') == 15);
}

TEST_CASE("partitions with posterior masses") {
  const auto r = run({"partitions", "--l", "3", "--input", kData + "/dixie_panel1.csv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("{1}|{2,3}\tg=4\t0.6") != std::string::npos);
  const auto j = run({"partitions", "--l", "3", "--input", kData + "/dixie_panel1.csv", "--format", "json"});
  CHECK(j.out.find("\"probability\"") != std::string::npos);
  CHECK(run({"partitions", "--l", "4", "--input", kData + "/dixie_panel1.csv"}).code != 0);
}

TEST_CASE("pool writes a reproducible report") {
  const std::vector<std::string> args{"pool", "--input", kData + "/dixie_panel1.csv", "--seed", "7"};
  const auto a = run(args);
  REQUIRE(a.code == 0);
  const auto b = run(args);
  CHECK(a.out == b.out);
  const auto doc = report_from_json(a.out);
  CHECK(doc.config.seed == 7);
  CHECK(doc.summary.rows.size() == 3);
  CHECK(std::abs(doc.summary.rows[1].posterior_mean - 0.360) < 0.005);
  CHECK(to_json(doc) == a.out);
}

TEST_CASE("echoed config reproduces the report") {
  const auto first = run({"pool", "--input", kData + "/orange_panel2.csv", "--seed", "123",
                          "--r", "700", "--b", "900", "--threshold", "0"});
  REQUIRE(first.code == 0);
  const auto doc = report_from_json(first.out);
  const auto again = run({"pool", "--input", kData + "/orange_panel2.csv", "--seed",
                          std::to_string(doc.config.seed), "--r", std::to_string(doc.config.r),
                          "--b", std::to_string(doc.config.b), "--threshold", "0"});
  CHECK(again.out == first.out);
}

TEST_CASE("binomial and summary inputs agree") {
  const auto binomial = temp_file("upool_binomial.csv", "label,cases,total\nA,25,100\nB,40,90\nC,0,30\n");
  // Summary rows built from the logit formulas.
  auto row = [](const char* label, double y, double n) {
    const bool edge = y == 0 || y == n;
    const double ys = edge ? y + 0.5 : y, ns = edge ? n + 1 : n;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", label, std::log(ys / (ns - ys)),
                  std::sqrt(1 / ys + 1 / (ns - ys)));
    return std::string(buf);
  };
  const auto summary = temp_file("upool_summary.csv", "label,estimate,se\n" + row("A", 25, 100) +
                                                          row("B", 40, 90) + row("C", 0, 30));
  const auto a = report_from_json(run({"pool", "--input", binomial, "--r", "400", "--b", "500"}).out);
  const auto b = report_from_json(run({"pool", "--input", summary, "--r", "400", "--b", "500"}).out);
  REQUIRE(a.summary.rows.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.summary.rows[i].posterior_mean == doctest::Approx(b.summary.rows[i].posterior_mean).epsilon(1e-12));
    CHECK(a.summary.rows[i].posterior_sd == doctest::Approx(b.summary.rows[i].posterior_sd).epsilon(1e-12));
    CHECK(a.summary.rows[i].lower == doctest::Approx(b.summary.rows[i].lower).epsilon(1e-12));
  }
}

TEST_CASE("pool-all, dpm and formats") {
  const auto pa = run({"pool-all", "--input", kData + "/dixie_panel1.csv", "--format", "csv"});
  CHECK(pa.code == 0);
  CHECK(pa.out.find("pool_all,all") != std::string::npos);
  const auto dpm = run({"dpm", "--input", kData + "/dixie_panel1.csv", "--m", "1", "--iterations",
                        "1500", "--burn-in", "500", "--format", "md"});
  CHECK(dpm.code == 0);
  CHECK(dpm.out.find("M = 1") != std::string::npos);
  const auto out_path = (std::filesystem::temp_directory_path() / "upool_out.json").string();
  const auto to_file = run({"pool-all", "--input", kData + "/dixie_panel1.csv", "--output", out_path});
  CHECK(to_file.code == 0);
  CHECK(to_file.out.empty());
  std::ifstream written(out_path);
  std::stringstream buf;
  buf << written.rdbuf();
  CHECK(report_from_json(buf.str()).command == "pool-all");
}

TEST_CASE("config file with flag overrides") {
  const auto cfg = temp_file("upool_run.cfg", "r = 300\nb = 200\nseed = 5\nformat = csv\n");
  const auto r = run({"pool", "--input", kData + "/dixie_panel1.csv", "--config", cfg, "--seed", "6"});
  CHECK(r.code == 0);
  CHECK(r.out.find("seed=6 r=300 b=200") != std::string::npos);
}

TEST_CASE("simulate from a scenario file") {
  const auto scenario = temp_file("upool_scenario.txt", "name = quick\nreps = 4\nr = 200\nb = 300\n");
  const auto r = run({"simulate", "--scenario", scenario, "--format", "csv"});
  CHECK(r.code == 0);
  CHECK(r.out.find("# scenario=quick seed=1 reps=4") != std::string::npos);
}

TEST_CASE("usage and input errors exit nonzero") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"pool"}).code == kExitUsage);
  CHECK(run({"pool", "--input", kData + "/dixie_panel1.csv", "--bogus"}).code == kExitUsage);
  CHECK(run({"pool", "--input", kData + "/dixie_panel1.csv", "--r", "abc"}).code == kExitUsage);
  CHECK(run({"partitions", "--l", "0"}).code == kExitUsage);
  CHECK(run({"pool", "--input", "/nonexistent.csv"}).code == kExitInput);
  CHECK(run({"pool", "--input", kData + "/dixie_panel1.csv", "--r", "1"}).code == kExitInput);
  CHECK(run({"pool", "--input", kData + "/dixie_panel1.csv", "--format", "xml"}).code == kExitInput);
  const auto bad = temp_file("upool_bad.csv", "label,estimate,se\nA,0.1,0.02\nB,0.2,0\n");
  const auto r = run({"pool", "--input", bad});
  CHECK(r.code == kExitInput);
  CHECK(r.err.find("line 3") != std::string::npos);
  CHECK(run({"--help"}).code == 0);
}
