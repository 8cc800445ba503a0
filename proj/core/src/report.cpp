#include "upool/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "upool/errors.hpp"

namespace upool {

namespace {

using Json = nlohmann::ordered_json;

// Fixed-point text for CSV / markdown cells.
std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Partition notation uses '|', which would split a markdown cell.
std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string to_string(InputForm f) { return f == InputForm::kBinomial ? "binomial" : "summary"; }

InputForm parse_form(const std::string& s) {
  if (s == "summary") return InputForm::kSummary;
  if (s == "binomial") return InputForm::kBinomial;
  throw ParseError(0, "report: unknown input form '" + s + "'");
}

Json row_json(const SummaryRow& r) {
  return Json{{"label", r.label},         {"observed", r.observed},
              {"posterior_mean", r.posterior_mean}, {"observed_se", r.observed_se},
              {"posterior_sd", r.posterior_sd},     {"lower", r.lower},
              {"upper", r.upper}};
}

SummaryRow row_from(const Json& j) {
  return {j.at("label").get<std::string>(), j.at("observed").get<double>(),
          j.at("posterior_mean").get<double>(), j.at("observed_se").get<double>(),
          j.at("posterior_sd").get<double>(),   j.at("lower").get<double>(),
          j.at("upper").get<double>()};
}

Json partition_json(const PartitionProbability& p) {
  Json j{{"partition", p.notation}};
  if (p.l3_label != 0) j["g"] = p.l3_label;
  j["probability"] = p.probability;
  return j;
}

PartitionProbability partition_from(const Json& j) {
  return {j.at("partition").get<std::string>(), j.value("g", 0),
          j.at("probability").get<double>()};
}

template <class T, class F>
Json array_of(const std::vector<T>& items, F fn) {
  Json a = Json::array();
  for (const auto& x : items) a.push_back(fn(x));
  return a;
}

template <class T, class F>
std::vector<T> vector_from(const Json& a, F fn) {
  std::vector<T> out;
  for (const auto& x : a) out.push_back(fn(x));
  return out;
}

Json config_json(const RunConfig& c) {
  Json dpm{{"m", c.dpm.m}};
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) dpm[key] = *v;
  };
  put("eta_b", c.dpm.eta_b);
  put("s_b", c.dpm.s_b);
  put("phi1", c.dpm.phi1);
  put("phi2", c.dpm.phi2);
  put("fixed_eta", c.dpm.fixed_eta);
  put("fixed_tau2", c.dpm.fixed_tau2);
  dpm["iterations"] = c.dpm.iterations;
  dpm["burn_in"] = c.dpm.burn_in;
  dpm["thin"] = c.dpm.thin;
  return Json{{"seed", c.seed},
              {"r", c.r},
              {"b", c.b},
              {"delta_scale", c.delta_scale},
              {"threshold", c.threshold},
              {"max_l", c.max_sources},
              {"format", to_string(c.format)},
              {"pool_all_mixing", to_string(c.pool_all_mixing)},
              {"dpm", dpm}};
}

RunConfig config_from(const Json& j) {
  RunConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.r = j.at("r").get<std::size_t>();
  c.b = j.at("b").get<std::size_t>();
  c.delta_scale = j.at("delta_scale").get<double>();
  c.threshold = j.at("threshold").get<double>();
  c.max_sources = j.at("max_l").get<int>();
  c.format = parse_output_format(j.at("format").get<std::string>());
  c.pool_all_mixing = parse_pool_all_mixing(j.at("pool_all_mixing").get<std::string>());
  const auto& d = j.at("dpm");
  c.dpm.m = d.at("m").get<double>();
  auto get = [&](const char* key) -> std::optional<double> {
    if (!d.contains(key)) return std::nullopt;
    return d.at(key).get<double>();
  };
  c.dpm.eta_b = get("eta_b");
  c.dpm.s_b = get("s_b");
  c.dpm.phi1 = get("phi1");
  c.dpm.phi2 = get("phi2");
  c.dpm.fixed_eta = get("fixed_eta");
  c.dpm.fixed_tau2 = get("fixed_tau2");
  c.dpm.iterations = d.at("iterations").get<int>();
  c.dpm.burn_in = d.at("burn_in").get<int>();
  c.dpm.thin = d.at("thin").get<int>();
  c.dpm.seed = c.seed;
  return c;
}

Json input_json(const ReportDocument& doc) {
  Json records = Json::array();
  for (std::size_t i = 0; i < doc.records.size(); ++i) {
    const auto& r = doc.records[i];
    Json j{{"label", r.label}};
    if (r.estimate) j["estimate"] = *r.estimate;
    if (r.se) j["se"] = *r.se;
    if (r.cases) j["cases"] = *r.cases;
    if (r.total) j["total"] = *r.total;
    j["y"] = doc.data.y_hat.at(i);
    j["v"] = doc.data.v.at(i);
    records.push_back(std::move(j));
  }
  return Json{{"form", to_string(doc.form)}, {"records", records}};
}

Json pool_all_json(const PoolAllRow& p) {
  return Json{{"mean", p.mean}, {"sd", p.sd}, {"lower", p.lower}, {"upper", p.upper}};
}

void write_md_rows(std::ostream& os, const std::vector<SummaryRow>& rows,
                   const std::optional<PoolAllRow>& pool_all) {
  os << "| Survey | Observed | Post. mean | Obs. SE | Post. SD | 95% interval |\n";
  os << "|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.label << " | " << fmt(r.observed, 3) << " | " << fmt(r.posterior_mean, 3)
       << " | " << fmt(r.observed_se, 3) << " | " << fmt(r.posterior_sd, 3) << " | ("
       << fmt(r.lower, 3) << ", " << fmt(r.upper, 3) << ") |\n";
  }
  if (pool_all) {
    os << "| Pool-all |  | " << fmt(pool_all->mean, 3) << " |  | " << fmt(pool_all->sd, 3)
       << " | (" << fmt(pool_all->lower, 3) << ", " << fmt(pool_all->upper, 3) << ") |\n";
  }
}

void write_md_partitions(std::ostream& os, const std::vector<PartitionProbability>& parts,
                         const char* heading) {
  if (parts.empty()) return;
  const bool labelled = parts.front().l3_label != 0;
  os << "\n" << heading << "\n\n";
  os << (labelled ? "| g | Partition | Probability |\n|---|---|---|\n"
                  : "| Partition | Probability |\n|---|---|\n");
  for (const auto& p : parts) {
    os << "| ";
    if (labelled) os << p.l3_label << " | ";
    os << md_cell(p.notation) << " | " << fmt(p.probability, 3) << " |\n";
  }
}

void write_csv_partitions(std::ostream& os, const std::vector<PartitionProbability>& parts,
                          const std::string& section) {
  for (const auto& p : parts) {
    os << section << "," << csv_field(p.notation) << "," << p.l3_label << ","
       << fmt(p.probability, 6) << "\n";
  }
}

std::string config_line(const RunConfig& c) {
  std::ostringstream os;
  os << "seed=" << c.seed << " r=" << c.r << " b=" << c.b << " delta_scale=" << c.delta_scale
     << " threshold=" << c.threshold << " max_l=" << c.max_sources
     << " pool_all_mixing=" << to_string(c.pool_all_mixing);
  return os.str();
}

}  // namespace

std::string to_json(const ReportDocument& doc) {
  Json j{{"version", kReportVersion},
         {"command", doc.command},
         {"config", config_json(doc.config)},
         {"input", input_json(doc)},
         {"summary", array_of(doc.summary.rows, row_json)},
         {"partitions", array_of(doc.summary.partitions, partition_json)}};
  j["pool_all"] = doc.summary.pool_all ? pool_all_json(*doc.summary.pool_all) : Json(nullptr);
  if (doc.dpm) {
    const auto& d = *doc.dpm;
    j["dpm"] = Json{{"hyperparameters",
                     Json{{"m", d.hyper.m},
                          {"eta_b", d.hyper.eta_b},
                          {"s_b", d.hyper.s_b},
                          {"phi1", d.hyper.phi1},
                          {"phi2", d.hyper.phi2}}},
                    {"iterations", d.iterations},
                    {"burn_in", d.burn_in},
                    {"thin", d.thin},
                    {"retained", d.retained},
                    {"summary", array_of(d.rows, row_json)},
                    {"partitions", array_of(d.partitions, partition_json)}};
  } else {
    j["dpm"] = nullptr;
  }
  return j.dump(2) + "\n";
}

ReportDocument report_from_json(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
  try {
    if (j.at("version").get<std::string>() != kReportVersion) {
      throw ParseError(0, "report: unsupported version");
    }
    ReportDocument doc;
    doc.command = j.at("command").get<std::string>();
    doc.config = config_from(j.at("config"));
    const auto& input = j.at("input");
    doc.form = parse_form(input.at("form").get<std::string>());
    for (const auto& r : input.at("records")) {
      InputRecord rec;
      rec.label = r.at("label").get<std::string>();
      if (r.contains("estimate")) rec.estimate = r.at("estimate").get<double>();
      if (r.contains("se")) rec.se = r.at("se").get<double>();
      if (r.contains("cases")) rec.cases = r.at("cases").get<std::int64_t>();
      if (r.contains("total")) rec.total = r.at("total").get<std::int64_t>();
      doc.data.labels.push_back(rec.label);
      doc.data.y_hat.push_back(r.at("y").get<double>());
      doc.data.v.push_back(r.at("v").get<double>());
      doc.records.push_back(std::move(rec));
    }
    doc.summary.rows = vector_from<SummaryRow>(j.at("summary"), row_from);
    doc.summary.partitions = vector_from<PartitionProbability>(j.at("partitions"), partition_from);
    if (const auto& p = j.at("pool_all"); !p.is_null()) {
      doc.summary.pool_all = PoolAllRow{p.at("mean").get<double>(), p.at("sd").get<double>(),
                                        p.at("lower").get<double>(), p.at("upper").get<double>()};
    }
    if (const auto& d = j.at("dpm"); !d.is_null()) {
      DpmSection s;
      const auto& h = d.at("hyperparameters");
      s.hyper = {h.at("m").get<double>(), h.at("eta_b").get<double>(), h.at("s_b").get<double>(),
                 h.at("phi1").get<double>(), h.at("phi2").get<double>()};
      s.iterations = d.at("iterations").get<int>();
      s.burn_in = d.at("burn_in").get<int>();
      s.thin = d.at("thin").get<int>();
      s.retained = d.at("retained").get<std::uint64_t>();
      s.rows = vector_from<SummaryRow>(d.at("summary"), row_from);
      s.partitions = vector_from<PartitionProbability>(d.at("partitions"), partition_from);
      doc.dpm = std::move(s);
    }
    return doc;
  } catch (const Json::exception& e) {
    throw ParseError(0, std::string("report: ") + e.what());
  } catch (const DomainError& e) {
    throw ParseError(0, std::string("report: ") + e.what());
  }
}

std::string to_csv(const ReportDocument& doc) {
  std::ostringstream os;
  os << "# command=" << doc.command << " " << config_line(doc.config) << "\n";
  os << "section,label,observed,posterior_mean,observed_se,posterior_sd,lower,upper\n";
  auto rows = [&](const std::string& section, const std::vector<SummaryRow>& rs) {
    for (const auto& r : rs) {
      os << section << "," << csv_field(r.label) << "," << fmt(r.observed, 6) << ","
         << fmt(r.posterior_mean, 6) << "," << fmt(r.observed_se, 6) << ","
         << fmt(r.posterior_sd, 6) << "," << fmt(r.lower, 6) << "," << fmt(r.upper, 6) << "\n";
    }
  };
  rows("uncertain_pooling", doc.summary.rows);
  if (const auto& p = doc.summary.pool_all) {
    os << "pool_all,all,,," << fmt(p->mean, 6) << ",," << fmt(p->sd, 6) << "," << fmt(p->lower, 6)
       << "," << fmt(p->upper, 6) << "\n";
  }
  if (doc.dpm) rows("dpm", doc.dpm->rows);
  const bool any_partitions =
      !doc.summary.partitions.empty() || (doc.dpm && !doc.dpm->partitions.empty());
  if (any_partitions) {
    os << "\nsection,partition,g,probability\n";
    write_csv_partitions(os, doc.summary.partitions, "uncertain_pooling");
    if (doc.dpm) write_csv_partitions(os, doc.dpm->partitions, "dpm");
  }
  return os.str();
}

std::string to_markdown(const ReportDocument& doc) {
  std::ostringstream os;
  os << "# upool " << doc.command << "\n\n";
  os << "`" << config_line(doc.config) << "`\n";
  if (!doc.summary.rows.empty() || doc.summary.pool_all) {
    os << "\n## Uncertain pooling\n\n";
    write_md_rows(os, doc.summary.rows, doc.summary.pool_all);
    write_md_partitions(os, doc.summary.partitions, "Partition posterior p(g|y):");
  }
  if (doc.dpm) {
    const auto& d = *doc.dpm;
    os << "\n## Dirichlet process mixture (M = " << d.hyper.m << ")\n\n";
    write_md_rows(os, d.rows, std::nullopt);
    os << "\nhyperparameters: eta_b=" << fmt(d.hyper.eta_b, 6) << " S_b=" << fmt(d.hyper.s_b, 6)
       << " phi1=" << d.hyper.phi1 << " phi2=" << fmt(d.hyper.phi2, 6)
       << "; sweeps=" << d.iterations << " burn_in=" << d.burn_in << " thin=" << d.thin << "\n";
    write_md_partitions(os, d.partitions, "Partition frequencies:");
  }
  return os.str();
}

std::string render(const ReportDocument& doc, OutputFormat format) {
  switch (format) {
    case OutputFormat::kCsv: return to_csv(doc);
    case OutputFormat::kMarkdown: return to_markdown(doc);
    case OutputFormat::kJson: break;
  }
  return to_json(doc);
}

namespace {

Json arr3(const std::array<double, 3>& a) { return Json::array({a[0], a[1], a[2]}); }

}  // namespace

std::string to_json(const SimReport& r) {
  const auto& s = r.scenario;
  Json parts = Json::array();
  for (std::size_t i = 0; i < r.partition_notation.size(); ++i) {
    parts.push_back(Json{{"partition", r.partition_notation[i]},
                         {"g", r.partition_labels.at(i)},
                         {"median_probability", r.median_pg.at(i)}});
  }
  Json j{{"version", kReportVersion},
         {"command", "simulate"},
         {"scenario",
          Json{{"name", s.name},
               {"psi1", s.psi1},
               {"psi2", s.psi2},
               {"v1", s.v1},
               {"v2", s.v2},
               {"delta", s.delta_shift},
               {"reps", s.reps},
               {"r", s.r},
               {"b", s.b},
               {"delta_scale", s.delta_scale},
               {"seed", s.base_seed}}},
         {"truth", arr3(r.truth)},
         {"partitions", parts},
         {"median_mean", arr3(r.median_mean)},
         {"median_sd", arr3(r.median_sd)},
         {"coverage", arr3(r.coverage)},
         {"coverage_se", arr3(r.coverage_se)},
         {"median_sd_reduction", arr3(r.median_sd_reduction)}};
  return j.dump(2) + "\n";
}

std::string to_csv(const SimReport& r) {
  std::ostringstream os;
  const auto& s = r.scenario;
  os << "# scenario=" << s.name << " seed=" << s.base_seed << " reps=" << s.reps << " r=" << s.r
     << " b=" << s.b << " delta=" << s.delta_shift << " delta_scale=" << s.delta_scale << "\n";
  os << "survey,truth,median_mean,median_sd,coverage,coverage_se,median_sd_reduction\n";
  for (int i = 0; i < 3; ++i) {
    os << (i + 1) << "," << fmt(r.truth[i], 6) << "," << fmt(r.median_mean[i], 6) << ","
       << fmt(r.median_sd[i], 6) << "," << fmt(r.coverage[i], 6) << ","
       << fmt(r.coverage_se[i], 6) << "," << fmt(r.median_sd_reduction[i], 3) << "\n";
  }
  os << "\npartition,g,median_probability\n";
  for (std::size_t i = 0; i < r.partition_notation.size(); ++i) {
    os << csv_field(r.partition_notation[i]) << "," << r.partition_labels.at(i) << ","
       << fmt(r.median_pg.at(i), 6) << "\n";
  }
  return os.str();
}

std::string to_markdown(const SimReport& r) {
  std::ostringstream os;
  const auto& s = r.scenario;
  os << "# Simulation: " << s.name << "\n\n`seed=" << s.base_seed << " reps=" << s.reps
     << " r=" << s.r << " b=" << s.b << " delta=" << s.delta_shift << "`\n\n";
  os << "| Survey | Truth | Median mean | Median SD | Coverage | Coverage SE |\n";
  os << "|---|---|---|---|---|---|\n";
  for (int i = 0; i < 3; ++i) {
    os << "| " << (i + 1) << " | " << fmt(r.truth[i], 3) << " | " << fmt(r.median_mean[i], 3)
       << " | " << fmt(r.median_sd[i], 3) << " | " << fmt(r.coverage[i], 3) << " | "
       << fmt(r.coverage_se[i], 3) << " |\n";
  }
  os << "\n| g | Partition | Median probability |\n|---|---|---|\n";
  for (std::size_t i = 0; i < r.partition_notation.size(); ++i) {
    os << "| " << r.partition_labels.at(i) << " | " << md_cell(r.partition_notation[i]) << " | "
       << fmt(r.median_pg.at(i), 3) << " |\n";
  }
  return os.str();
}

std::string render(const SimReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::kCsv: return to_csv(report);
    case OutputFormat::kMarkdown: return to_markdown(report);
    case OutputFormat::kJson: break;
  }
  return to_json(report);
}

}  // namespace upool
