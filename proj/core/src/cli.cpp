#include "upool/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "upool/dpm.hpp"
#include "upool/errors.hpp"
#include "upool/io.hpp"
#include "upool/pipeline.hpp"
#include "upool/pool_all.hpp"
#include "upool/report.hpp"
#include "upool/simulation.hpp"

namespace upool {

namespace {

// Flag values; each is applied only when given so a --config file can supply
// the rest.
struct Flags {
  std::string input;
  std::string config_file;
  std::string output;
  std::string format;
  std::string mixing;
  std::string scenario;
  std::size_t r = 0;
  std::size_t b = 0;
  std::uint64_t seed = 0;
  double delta_scale = 0.0;
  double threshold = 0.0;
  int max_l = 0;
  double m = 0.0;
  double eta_b = 0.0, s_b = 0.0, phi1 = 0.0, phi2 = 0.0;
  int iterations = 0, burn_in = 0, thin = 0;
  int reps = 0;
  int l = 0;
};

struct Options {
  CLI::Option* r = nullptr;
  CLI::Option* b = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* delta_scale = nullptr;
  CLI::Option* threshold = nullptr;
  CLI::Option* max_l = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* mixing = nullptr;
  CLI::Option* m = nullptr;
  CLI::Option* eta_b = nullptr;
  CLI::Option* s_b = nullptr;
  CLI::Option* phi1 = nullptr;
  CLI::Option* phi2 = nullptr;
  CLI::Option* iterations = nullptr;
  CLI::Option* burn_in = nullptr;
  CLI::Option* thin = nullptr;
  CLI::Option* reps = nullptr;
  CLI::Option* input = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, Options& o, bool needs_input) {
  o.input = cmd->add_option("--input", f.input, "Input file (label,estimate,se or label,cases,total)");
  if (needs_input) o.input->required();
  cmd->add_option("--config", f.config_file, "Flat key = value config file");
  cmd->add_option("--output", f.output, "Write the report here instead of stdout");
  o.format = cmd->add_option("--format", f.format, "json | csv | md");
  o.seed = cmd->add_option("--seed", f.seed, "RNG seed");
  o.r = cmd->add_option("--r", f.r, "Grid size for delta^2");
  o.b = cmd->add_option("--b", f.b, "Posterior draws");
  o.delta_scale = cmd->add_option("--delta-scale", f.delta_scale, "Scale s of the delta prior");
  o.threshold = cmd->add_option("--threshold", f.threshold, "Display threshold for p(g|y)");
  o.max_l = cmd->add_option("--max-l", f.max_l, "Largest number of sources to enumerate");
  o.mixing = cmd->add_option("--pool-all-mixing", f.mixing, "joint | single");
}

void add_dpm(CLI::App* cmd, Flags& f, Options& o) {
  o.m = cmd->add_option("--m", f.m, "DP concentration M");
  o.eta_b = cmd->add_option("--eta-b", f.eta_b, "Prior mean of eta");
  o.s_b = cmd->add_option("--s-b", f.s_b, "Prior variance of eta");
  o.phi1 = cmd->add_option("--phi1", f.phi1, "Shape parameter for 1/tau2 (times 2)");
  o.phi2 = cmd->add_option("--phi2", f.phi2, "Rate parameter for 1/tau2 (times 2)");
  o.iterations = cmd->add_option("--iterations", f.iterations, "Gibbs sweeps including burn-in");
  o.burn_in = cmd->add_option("--burn-in", f.burn_in, "Discarded sweeps");
  o.thin = cmd->add_option("--thin", f.thin, "Keep every thin-th sweep");
}

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

RunConfig build_config(const Flags& f, const Options& o) {
  RunConfig c;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw ParseError(0, "cannot open config file '" + f.config_file + "'");
    apply_config(in, c);
  }
  if (given(o.r)) c.r = f.r;
  if (given(o.b)) c.b = f.b;
  if (given(o.seed)) c.seed = f.seed;
  if (given(o.delta_scale)) c.delta_scale = f.delta_scale;
  if (given(o.threshold)) c.threshold = f.threshold;
  if (given(o.max_l)) c.max_sources = f.max_l;
  if (given(o.format)) c.format = parse_output_format(f.format);
  if (given(o.mixing)) c.pool_all_mixing = parse_pool_all_mixing(f.mixing);
  if (given(o.m)) c.dpm.m = f.m;
  if (given(o.eta_b)) c.dpm.eta_b = f.eta_b;
  if (given(o.s_b)) c.dpm.s_b = f.s_b;
  if (given(o.phi1)) c.dpm.phi1 = f.phi1;
  if (given(o.phi2)) c.dpm.phi2 = f.phi2;
  if (given(o.iterations)) c.dpm.iterations = f.iterations;
  if (given(o.burn_in)) c.dpm.burn_in = f.burn_in;
  if (given(o.thin)) c.dpm.thin = f.thin;
  c.dpm.seed = c.seed;
  c.validate();
  return c;
}

PoolSettings pool_settings(const RunConfig& c) {
  PoolSettings s;
  s.r = c.r;
  s.b = c.b;
  s.seed = c.seed;
  s.delta_scale = c.delta_scale;
  s.threshold = c.threshold;
  s.max_sources = c.max_sources;
  s.pool_all_mixing = c.pool_all_mixing;
  return s;
}

ReportDocument base_document(const std::string& command, const ParsedInput& input,
                             const RunConfig& config) {
  ReportDocument doc;
  doc.command = command;
  doc.form = input.form;
  doc.records = input.records;
  doc.data = input.data;
  doc.config = config;
  return doc;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path);
  if (!file) throw ParseError(0, "cannot write output file '" + path + "'");
  file << text;
}

std::string run_pool(const ParsedInput& input, const RunConfig& config) {
  auto doc = base_document("pool", input, config);
  doc.summary = run_uncertain_pooling(input.data, pool_settings(config)).summary;
  return render(doc, config.format);
}

std::string run_pool_all(const ParsedInput& input, const RunConfig& config) {
  if (input.data.size() > config.max_sources &&
      config.pool_all_mixing == PoolAllMixing::kJointMarginal) {
    throw DomainError("pool-all: joint mixing enumerates partitions; L exceeds max_l");
  }
  auto doc = base_document("pool-all", input, config);
  const auto grid = build_grid(config.r, config.delta_scale);
  doc.summary.pool_all =
      pool_all(input.data, grid, config.pool_all_mixing, config.b, pool_all_seed(config.seed)).row();
  return render(doc, config.format);
}

std::string run_dpm(const ParsedInput& input, const RunConfig& config) {
  auto doc = base_document("dpm", input, config);
  const auto draws = dpm_gibbs(input.data, config.dpm);
  DpmSection s;
  s.hyper = draws.hyper;
  s.iterations = config.dpm.iterations;
  s.burn_in = config.dpm.burn_in;
  s.thin = config.dpm.thin;
  s.retained = draws.retained;
  s.rows = draws.rows;
  s.partitions = draws.partition_frequencies;
  doc.dpm = std::move(s);
  return render(doc, config.format);
}

// One line per partition: notation, then g at L = 3, then the posterior mass
// when data were given. JSON gives the same as an array of objects.
std::string run_partitions(int l, const ParsedInput* input, const RunConfig& config,
                           bool json) {
  const auto space = std::make_shared<const PartitionSpace>(
      enumerate_partitions(l, std::max(config.max_sources, l)));
  std::vector<double> mass;
  if (input != nullptr) {
    if (input->data.size() != l) {
      throw DomainError("partitions: --l does not match the number of input records");
    }
    const auto grid = build_grid(config.r, config.delta_scale);
    mass = marginal_g(evaluate_joint(input->data, space, grid));
  }
  std::ostringstream os;
  if (json) {
    os << "[\n";
    for (std::size_t i = 0; i < space->size(); ++i) {
      const auto& p = (*space)[i];
      os << "  {\"partition\": \"" << p.to_string() << "\"";
      if (l == 3) os << ", \"g\": " << l3_label(p);
      if (!mass.empty()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", mass[i]);
        os << ", \"probability\": " << buf;
      }
      os << "}" << (i + 1 < space->size() ? "," : "") << "\n";
    }
    os << "]\n";
    return os.str();
  }
  for (std::size_t i = 0; i < space->size(); ++i) {
    const auto& p = (*space)[i];
    os << p.to_string();
    if (l == 3) os << "\tg=" << l3_label(p);
    if (!mass.empty()) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.6f", mass[i]);
      os << "\t" << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Uncertain pooling of survey estimates", "upool"};
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Expand all help");

  Flags f;
  Options pool_o, pool_all_o, dpm_o, sim_o, part_o;
  auto* pool = app.add_subcommand("pool", "Uncertain pooling over all partitions");
  add_common(pool, f, pool_o, true);
  auto* pool_all_cmd = app.add_subcommand("pool-all", "Complete pooling baseline");
  add_common(pool_all_cmd, f, pool_all_o, true);
  auto* dpm = app.add_subcommand("dpm", "Dirichlet process mixture baseline");
  add_common(dpm, f, dpm_o, true);
  add_dpm(dpm, f, dpm_o);

  auto* simulate = app.add_subcommand("simulate", "Replicated three-survey simulation");
  simulate->add_option("--scenario", f.scenario, "Scenario file (key = value)")->required();
  simulate->add_option("--output", f.output, "Write the report here instead of stdout");
  sim_o.format = simulate->add_option("--format", f.format, "json | csv | md");
  sim_o.seed = simulate->add_option("--seed", f.seed, "Override the scenario seed");
  sim_o.reps = simulate->add_option("--reps", f.reps, "Override the replicate count");
  sim_o.r = simulate->add_option("--r", f.r, "Override the grid size");
  sim_o.b = simulate->add_option("--b", f.b, "Override the draw count");

  auto* partitions = app.add_subcommand("partitions", "List set partitions");
  partitions->add_option("--l", f.l, "Number of sources")->required()->check(CLI::Range(1, kMaxSources));
  add_common(partitions, f, part_o, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    std::string text;
    if (pool->parsed()) {
      const auto config = build_config(f, pool_o);
      text = run_pool(parse_input_file(f.input), config);
    } else if (pool_all_cmd->parsed()) {
      const auto config = build_config(f, pool_all_o);
      text = run_pool_all(parse_input_file(f.input), config);
    } else if (dpm->parsed()) {
      const auto config = build_config(f, dpm_o);
      text = run_dpm(parse_input_file(f.input), config);
    } else if (simulate->parsed()) {
      auto scenario = parse_scenario_file(f.scenario);
      if (given(sim_o.seed)) scenario.base_seed = f.seed;
      if (given(sim_o.reps)) scenario.reps = f.reps;
      if (given(sim_o.r)) scenario.r = f.r;
      if (given(sim_o.b)) scenario.b = f.b;
      scenario.validate();
      const auto format = given(sim_o.format) ? parse_output_format(f.format) : OutputFormat::kJson;
      text = render(run_scenario(scenario), format);
    } else if (partitions->parsed()) {
      const auto config = build_config(f, part_o);
      const bool json = given(part_o.format) && config.format == OutputFormat::kJson;
      if (f.input.empty()) {
        text = run_partitions(f.l, nullptr, config, json);
      } else {
        const auto input = parse_input_file(f.input);
        text = run_partitions(f.l, &input, config, json);
      }
    }
    emit(text, f.output, out);
    return kExitOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCompute;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}

}  // namespace upool
