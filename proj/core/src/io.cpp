#include "upool/io.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>

#include "upool/errors.hpp"

namespace upool {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> to_double(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> to_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) return std::nullopt;
  return static_cast<std::int64_t>(v);
}

bool skip_line(const std::string& line) { return line.empty() || line.front() == '#'; }

// Reads "key = value" pairs, reporting the line of each.
void for_each_entry(std::istream& in,
                    const std::function<void(const std::string&, const std::string&, std::size_t)>& fn) {
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ParseError(line_no, "expected 'key = value'");
    fn(key, value, line_no);
  }
}

double need_double(const std::string& v, std::size_t line, const std::string& key) {
  const auto d = to_double(v);
  if (!d) throw ParseError(line, key + ": not a number: '" + v + "'");
  return *d;
}

std::int64_t need_int(const std::string& v, std::size_t line, const std::string& key) {
  const auto i = to_int(v);
  if (!i) throw ParseError(line, key + ": not an integer: '" + v + "'");
  return *i;
}

std::size_t need_count(const std::string& v, std::size_t line, const std::string& key) {
  const auto i = need_int(v, line, key);
  if (i < 0) throw ParseError(line, key + ": must be non-negative");
  return static_cast<std::size_t>(i);
}

}  // namespace

LogitEstimate logit_transform(std::int64_t cases, std::int64_t total) {
  if (total < 1) throw DomainError("logit_transform: total must be >= 1");
  if (cases < 0 || cases > total) throw DomainError("logit_transform: cases must be in [0, total]");
  double y = static_cast<double>(cases);
  double n = static_cast<double>(total);
  if (cases == 0 || cases == total) {
    y += 0.5;
    n += 1.0;
  }
  return {std::log(y / (n - y)), 1.0 / y + 1.0 / (n - y)};
}

ParsedInput parse_input(std::istream& in) {
  ParsedInput out;
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (skip_line(line)) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      std::vector<std::string> names;
      for (const auto& f : fields) names.push_back(lower(f));
      if (names == std::vector<std::string>{"label", "estimate", "se"}) {
        out.form = InputForm::kSummary;
      } else if (names == std::vector<std::string>{"label", "cases", "total"}) {
        out.form = InputForm::kBinomial;
      } else {
        throw ParseError(line_no, "header must be 'label,estimate,se' or 'label,cases,total'");
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 fields, found " + std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(line_no, "missing label");
    InputRecord rec;
    rec.label = fields[0];
    if (out.form == InputForm::kSummary) {
      rec.estimate = to_double(fields[1]);
      rec.se = to_double(fields[2]);
      if (!rec.estimate || !rec.se) {
        // Integer-only rows in a summary file usually mean a mixed file.
        throw ParseError(line_no, "estimate and se must be numbers");
      }
      if (!(*rec.se > 0.0)) throw ParseError(line_no, "se must be > 0");
      out.data.y_hat.push_back(*rec.estimate);
      out.data.v.push_back(*rec.se * *rec.se);
    } else {
      rec.cases = to_int(fields[1]);
      rec.total = to_int(fields[2]);
      if (!rec.cases || !rec.total) {
        throw ParseError(line_no, "cases and total must be integers (mixed input forms?)");
      }
      if (*rec.total < 1) throw ParseError(line_no, "total must be >= 1");
      if (*rec.cases < 0) throw ParseError(line_no, "cases must be >= 0");
      if (*rec.cases > *rec.total) throw ParseError(line_no, "cases exceed total");
      const auto t = logit_transform(*rec.cases, *rec.total);
      out.data.y_hat.push_back(t.estimate);
      out.data.v.push_back(t.variance);
    }
    out.data.labels.push_back(rec.label);
    out.records.push_back(std::move(rec));
  }
  if (!have_header) throw ParseError(0, "no records");
  if (out.records.empty()) throw ParseError(line_no, "no records");
  out.data.validate();
  return out;
}

ParsedInput parse_input_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open input file '" + path.string() + "'");
  return parse_input(in);
}

OutputFormat parse_output_format(const std::string& name) {
  const auto n = lower(name);
  if (n == "json") return OutputFormat::kJson;
  if (n == "csv") return OutputFormat::kCsv;
  if (n == "md" || n == "markdown") return OutputFormat::kMarkdown;
  throw DomainError("unknown output format '" + name + "' (json|csv|md)");
}

std::string to_string(OutputFormat format) {
  switch (format) {
    case OutputFormat::kJson: return "json";
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kMarkdown: return "md";
  }
  return "json";
}

PoolAllMixing parse_pool_all_mixing(const std::string& name) {
  const auto n = lower(name);
  if (n == "joint") return PoolAllMixing::kJointMarginal;
  if (n == "single") return PoolAllMixing::kSingleCluster;
  throw DomainError("unknown pool-all mixing '" + name + "' (joint|single)");
}

std::string to_string(PoolAllMixing mixing) {
  return mixing == PoolAllMixing::kSingleCluster ? "single" : "joint";
}

void RunConfig::validate() const {
  if (r < 2) throw DomainError("config: r must be >= 2");
  if (b < 1) throw DomainError("config: b must be >= 1");
  if (!std::isfinite(delta_scale) || !(delta_scale > 0.0)) {
    throw DomainError("config: delta_scale must be > 0");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DomainError("config: threshold must be in [0, 1]");
  if (max_sources < 1 || max_sources > kMaxSources) {
    throw DomainError("config: max_l must be in [1, " + std::to_string(kMaxSources) + "]");
  }
  if (!(dpm.m > 0.0)) throw DomainError("config: m must be > 0");
}

void apply_config(std::istream& in, RunConfig& c) {
  for_each_entry(in, [&](const std::string& key, const std::string& v, std::size_t line) {
    if (key == "r") c.r = need_count(v, line, key);
    else if (key == "b") c.b = need_count(v, line, key);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(need_count(v, line, key));
    else if (key == "delta_scale") c.delta_scale = need_double(v, line, key);
    else if (key == "threshold") c.threshold = need_double(v, line, key);
    else if (key == "max_l") c.max_sources = static_cast<int>(need_int(v, line, key));
    else if (key == "format") {
      try {
        c.format = parse_output_format(v);
      } catch (const DomainError& e) {
        throw ParseError(line, e.what());
      }
    } else if (key == "pool_all_mixing") {
      try {
        c.pool_all_mixing = parse_pool_all_mixing(v);
      } catch (const DomainError& e) {
        throw ParseError(line, e.what());
      }
    } else if (key == "m") c.dpm.m = need_double(v, line, key);
    else if (key == "eta_b") c.dpm.eta_b = need_double(v, line, key);
    else if (key == "s_b") c.dpm.s_b = need_double(v, line, key);
    else if (key == "phi1") c.dpm.phi1 = need_double(v, line, key);
    else if (key == "phi2") c.dpm.phi2 = need_double(v, line, key);
    else if (key == "iterations") c.dpm.iterations = static_cast<int>(need_int(v, line, key));
    else if (key == "burn_in") c.dpm.burn_in = static_cast<int>(need_int(v, line, key));
    else if (key == "thin") c.dpm.thin = static_cast<int>(need_int(v, line, key));
    else throw ParseError(line, "unknown config key '" + key + "'");
  });
}

SimScenario parse_scenario(std::istream& in) {
  SimScenario s;
  for_each_entry(in, [&](const std::string& key, const std::string& v, std::size_t line) {
    if (key == "name") s.name = v;
    else if (key == "psi1") s.psi1 = need_double(v, line, key);
    else if (key == "psi2") s.psi2 = need_double(v, line, key);
    else if (key == "v1") s.v1 = need_double(v, line, key);
    else if (key == "v2") s.v2 = need_double(v, line, key);
    else if (key == "se1") s.v1 = std::pow(need_double(v, line, key), 2);
    else if (key == "se2") s.v2 = std::pow(need_double(v, line, key), 2);
    else if (key == "delta") s.delta_shift = need_double(v, line, key);
    else if (key == "delta_steps") s.delta_shift = need_double(v, line, key) * kSeparationStep;
    else if (key == "reps") s.reps = static_cast<int>(need_int(v, line, key));
    else if (key == "r") s.r = need_count(v, line, key);
    else if (key == "b") s.b = need_count(v, line, key);
    else if (key == "seed") s.base_seed = static_cast<std::uint64_t>(need_count(v, line, key));
    else if (key == "delta_scale") s.delta_scale = need_double(v, line, key);
    else throw ParseError(line, "unknown scenario key '" + key + "'");
  });
  s.validate();
  return s;
}

SimScenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(0, "cannot open scenario file '" + path.string() + "'");
  return parse_scenario(in);
}

}  // namespace upool
