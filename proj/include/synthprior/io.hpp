#pragma once

// File formats: data CSV, prior and scenario JSON, and the CSV/TSV/JSON
// reports. All numbers are written in fixed notation so outputs diff cleanly.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "synthprior/diagnostics.hpp"
#include "synthprior/error.hpp"
#include "synthprior/gibbs.hpp"
#include "synthprior/model.hpp"
#include "synthprior/prior.hpp"
#include "synthprior/scenarios.hpp"

namespace synthprior::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

inline std::string prob(double p) { return fixed(p, 4); }
inline std::string pct(double p) { return fixed(100.0 * p, 1); }
inline std::string num(double v) { return fixed(v, 6); }

/// Value rounded to `decimals` places for JSON emission.
inline double rounded(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double r = std::round(v * scale) / scale;
  return r == 0.0 ? 0.0 : r;
}

// ---------------------------------------------------------------------------
// Text files
// ---------------------------------------------------------------------------

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot write " + path.string());
  out << text;
  if (!out) throw io_error("write failed for " + path.string());
}

inline std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, sep)) fields.push_back(field);
  if (!line.empty() && line.back() == sep) fields.emplace_back();
  return fields;
}

inline std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

inline bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Numeric CSV with a header line. Errors name the 1-based line and data row.
inline Table parse_numeric_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  Table table;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, ',');
    if (table.header.empty()) {
      for (auto& f : fields) table.header.push_back(trim(f));
      continue;
    }
    const std::size_t row_index = table.rows.size() + 1;
    if (fields.size() != table.header.size()) {
      throw parse_error(source + ":" + std::to_string(line_no) + ": data row " +
                        std::to_string(row_index) + " has " + std::to_string(fields.size()) +
                        " fields, header has " + std::to_string(table.header.size()));
    }
    std::vector<double> values(fields.size());
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], values[k])) {
        throw parse_error(source + ":" + std::to_string(line_no) + ": data row " +
                          std::to_string(row_index) + ", column '" + table.header[k] +
                          "': not a finite number: '" + trim(fields[k]) + "'");
      }
    }
    table.rows.push_back(std::move(values));
  }
  if (table.header.empty()) throw parse_error(source + ": missing header row");
  return table;
}

struct LabeledDataset {
  Dataset data;
  std::vector<std::string> labels;
};

/// Data CSV: a `y` column (0/1) plus covariate columns in order. An intercept
/// column is prepended unless `intercept` is false.
inline LabeledDataset parse_data_csv(const std::string& text, bool intercept,
                                     const std::string& source = "data") {
  const Table table = parse_numeric_csv(text, source);
  std::size_t y_col = table.header.size();
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (table.header[k] == "y") y_col = k;
  }
  if (y_col == table.header.size()) throw parse_error(source + ": no 'y' column in header");
  if (table.rows.empty()) throw parse_error(source + ": no data rows");

  LabeledDataset out;
  if (intercept) out.labels.emplace_back("intercept");
  for (std::size_t k = 0; k < table.header.size(); ++k) {
    if (k != y_col) out.labels.push_back(table.header[k]);
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(out.labels.size());
  if (p == 0) throw parse_error(source + ": no covariates and no intercept");
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const double yi = row[y_col];
    if (yi != 0.0 && yi != 1.0) {
      throw parse_error(source + ": data row " + std::to_string(i + 1) + ": y must be 0 or 1");
    }
    y[i] = yi;
    Eigen::Index c = 0;
    if (intercept) x(i, c++) = 1.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k != y_col) x(i, c++) = row[k];
    }
  }
  out.data = Dataset(std::move(x), std::move(y));
  return out;
}

inline Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

// ---------------------------------------------------------------------------
// Prior file
// ---------------------------------------------------------------------------

inline json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw parse_error(source + ": " + e.what());
  }
}

inline double number_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw parse_error(where + ": '" + key + "' must be a number");
  }
  return obj.at(key).get<double>();
}

/// One entry: {"covariates": [...], "a": .., "b": ..} or
/// {"covariates": [...], "mean": .., "weight": ..}.
inline DesignPoint design_point_from_json(const json& entry, const std::string& where) {
  if (!entry.is_object()) throw parse_error(where + ": entry must be an object");
  if (!entry.contains("covariates") || !entry.at("covariates").is_array()) {
    throw parse_error(where + ": 'covariates' array is required");
  }
  std::vector<double> cov;
  for (const auto& v : entry.at("covariates")) {
    if (!v.is_number()) throw parse_error(where + ": covariates must be numbers");
    cov.push_back(v.get<double>());
  }
  const Eigen::VectorXd x = to_vector(cov);
  const bool has_ab = entry.contains("a") || entry.contains("b");
  const bool has_mw = entry.contains("mean") || entry.contains("weight");
  if (has_ab == has_mw) {
    throw parse_error(where + ": give either (a, b) or (mean, weight)");
  }
  try {
    if (has_ab) {
      const DesignPoint pt{x, number_field(entry, "a", where), number_field(entry, "b", where)};
      if (!(pt.a > 0.0) || !(pt.b > 0.0)) throw domain_error("a and b must be positive");
      return pt;
    }
    return elicit_from_mean_and_weight(number_field(entry, "mean", where),
                                       number_field(entry, "weight", where), x);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    throw parse_error(where + ": " + e.what());
  }
}

inline BcjPrior prior_from_json(const json& doc, const std::string& source) {
  const json* entries = &doc;
  if (doc.is_object()) {
    if (!doc.contains("points")) throw parse_error(source + ": expected a list or {\"points\": [...]}");
    entries = &doc.at("points");
  }
  if (!entries->is_array() || entries->empty()) {
    throw parse_error(source + ": prior needs a non-empty list of design points");
  }
  std::vector<DesignPoint> points;
  for (std::size_t j = 0; j < entries->size(); ++j) {
    points.push_back(design_point_from_json((*entries)[j], source + ": entry " + std::to_string(j)));
  }
  try {
    return BcjPrior(std::move(points));
  } catch (const Error& e) {
    throw parse_error(source + ": " + e.what());
  }
}

inline BcjPrior parse_prior(const std::string& text, const std::string& source = "prior") {
  return prior_from_json(parse_json(text, source), source);
}

inline json prior_to_json(const BcjPrior& prior) {
  json out = json::array();
  for (const auto& pt : prior.points()) {
    out.push_back({{"covariates", to_std(pt.x_tilde)}, {"a", pt.a}, {"b", pt.b}});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chain and scenario config
// ---------------------------------------------------------------------------

inline json chain_to_json(const ChainConfig& c) {
  return {{"iterations", c.iterations}, {"burn_in", c.burn_in}, {"thin", c.thin}, {"seed", c.seed}};
}

inline ChainConfig chain_from_json(const json& j, ChainConfig base = {}) {
  try {
    if (j.contains("iterations")) base.iterations = j.at("iterations").get<long>();
    if (j.contains("burn_in")) base.burn_in = j.at("burn_in").get<long>();
    if (j.contains("thin")) base.thin = j.at("thin").get<long>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw parse_error(std::string("chain settings: ") + e.what());
  }
  return base;
}

/// Scenario file. Every key is optional; missing keys take the dose-finding defaults.
inline TrialScenario scenario_from_json(const json& doc, const std::string& source = "scenario") {
  if (!doc.is_object()) throw parse_error(source + ": scenario must be a JSON object");
  TrialScenario s;
  s.chain.seed = kDefaultSeed;
  try {
    if (doc.contains("doses")) s.doses = doc.at("doses").get<std::vector<double>>();
    if (doc.contains("per_arm")) s.per_arm = doc.at("per_arm").get<int>();
    if (doc.contains("truth")) {
      const auto& t = doc.at("truth");
      s.truth = EmaxTruth::from_probabilities(t.value("p_placebo", 0.10), t.value("p_max", 0.35),
                                              t.value("ed50", 0.5));
    }
    if (doc.contains("prior")) s.prior = prior_from_json(doc.at("prior"), source + ": prior");
    if (doc.contains("chain")) s.chain = chain_from_json(doc.at("chain"), s.chain);
    if (doc.contains("seed")) s.chain.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("replicates")) s.replicates = doc.at("replicates").get<int>();
    if (doc.contains("delta")) s.delta = doc.at("delta").get<double>();
    if (doc.contains("level")) s.level = doc.at("level").get<double>();
    if (doc.contains("decision_doses")) {
      s.decision_doses = doc.at("decision_doses").get<std::vector<double>>();
    }
  } catch (const json::exception& e) {
    throw parse_error(source + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::parse) throw;
    throw parse_error(source + ": " + e.what());
  }
  return s;
}

inline TrialScenario parse_scenario(const std::string& text, const std::string& source = "scenario") {
  return scenario_from_json(parse_json(text, source), source);
}

/// Fully materialised scenario; round-trips through scenario_from_json.
inline json scenario_to_json(const TrialScenario& s) {
  json truth = {{"p_placebo", sigmoid(s.truth.e0)},
                {"p_max", sigmoid(s.truth.e0 + s.truth.span)},
                {"ed50", s.truth.ed50}};
  return {{"doses", s.doses},
          {"per_arm", s.per_arm},
          {"truth", truth},
          {"prior", prior_to_json(s.prior)},
          {"chain", chain_to_json(s.chain)},
          {"replicates", s.replicates},
          {"delta", s.delta},
          {"level", s.level},
          {"decision_doses", s.resolved_decision_doses()}};
}

// ---------------------------------------------------------------------------
// Draws
// ---------------------------------------------------------------------------

inline std::string draws_to_csv(const PosteriorDraws& draws) {
  std::string out;
  for (std::size_t k = 0; k < draws.labels.size(); ++k) {
    out += (k ? "," : "") + draws.labels[k];
  }
  out += '\n';
  for (Eigen::Index t = 0; t < draws.kept(); ++t) {
    for (Eigen::Index k = 0; k < draws.dim(); ++k) {
      out += (k ? "," : "") + fixed(draws.draws(t, k), 10);
    }
    out += '\n';
  }
  return out;
}

inline PosteriorDraws draws_from_csv(const std::string& text, const std::string& source = "draws") {
  const Table table = parse_numeric_csv(text, source);
  PosteriorDraws d;
  d.labels = table.header;
  d.draws.resize(static_cast<Eigen::Index>(table.rows.size()),
                 static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    for (std::size_t k = 0; k < table.header.size(); ++k) {
      d.draws(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = table.rows[t][k];
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json summary_to_json(const ChainSummary& s) {
  json coefs = json::array();
  for (const auto& c : s.coefficients) {
    coefs.push_back({{"label", c.label},
                     {"mean", rounded(c.mean, 6)},
                     {"sd", rounded(c.sd, 6)},
                     {"ess", rounded(c.ess, 1)},
                     {"geweke_z", rounded(c.geweke_z, 4)}});
  }
  json points = json::array();
  for (const auto& p : s.points) {
    std::vector<double> cov;
    for (Eigen::Index k = 0; k < p.x.size(); ++k) cov.push_back(rounded(p.x[k], 6));
    points.push_back({{"covariates", cov},
                      {"mean", rounded(p.mean, 4)},
                      {"lo", rounded(p.interval.lo, 4)},
                      {"hi", rounded(p.interval.hi, 4)},
                      {"width", rounded(p.interval.width(), 4)}});
  }
  return {{"level", s.level}, {"coefficients", coefs}, {"points", points}};
}

inline std::string coefficient_table_csv(const std::vector<CoefficientSummary>& rows) {
  std::string out = "coefficient,mean,sd,ess,geweke_z\n";
  for (const auto& c : rows) {
    out += c.label + "," + num(c.mean) + "," + num(c.sd) + "," + fixed(c.ess, 1) + "," +
           fixed(c.geweke_z, 4) + "\n";
  }
  return out;
}

/// Dose, true P, posterior means (SD) and mean CrI widths for both priors.
/// SD columns are empty for a single replicate.
inline std::string table3_csv(const ReplicationReport& r) {
  std::string out =
      "dose_mg,true_p_pct,bcj_mean_pct,bcj_sd_pct,flat_mean_pct,flat_sd_pct,bcj_width_pp,"
      "flat_width_pp\n";
  for (const auto& d : r.doses) {
    out += fixed(d.dose, 1) + "," + pct(d.true_p) + "," + pct(d.bcj_mean) + "," +
           (d.bcj_sd ? pct(*d.bcj_sd) : "") + "," + pct(d.flat_mean) + "," +
           (d.flat_sd ? pct(*d.flat_sd) : "") + "," + pct(d.bcj_width) + "," +
           pct(d.flat_width) + "\n";
  }
  return out;
}

inline std::string table4_csv(const ReplicationReport& r) {
  std::string out = "dose_mg,bcj,flat\n";
  for (const auto& d : r.decisions) {
    out += fixed(d.dose, 1) + "," + prob(d.bcj) + "," + prob(d.flat) + "\n";
  }
  return out;
}

inline std::string diagnostics_csv(const ReplicationReport& r) {
  std::string out = "prior,coefficient,mean_ess,geweke_within_2,geweke_all_within_2,replicates\n";
  for (const auto& d : r.diagnostics) {
    out += d.prior + "," + d.coefficient + "," + fixed(d.mean_ess, 1) + "," +
           std::to_string(d.geweke_within_2) + "," + std::to_string(d.geweke_all_within_2) + "," +
           std::to_string(d.replicates) + "\n";
  }
  return out;
}

inline std::string plot_tsv(const ReplicationReport& r) {
  std::string out = "dose\tmean\tlo\thi\tprior\n";
  for (const auto& p : r.plot) {
    out += fixed(p.dose, 2) + "\t" + prob(p.mean) + "\t" + prob(p.lo) + "\t" + prob(p.hi) + "\t" +
           p.prior + "\n";
  }
  return out;
}

/// One row per (prior, temperature): posterior mean and 95% CrI in percent.
inline std::string table5_csv(const OringTable& t) {
  std::string out = "prior,temp_f,mean_pct,lo_pct,hi_pct\n";
  for (const auto& r : t.rows) {
    out += r.prior + "," + fixed(r.temperature, 0) + "," + pct(r.mean) + "," +
           pct(r.interval.lo) + "," + pct(r.interval.hi) + "\n";
  }
  return out;
}

}  // namespace synthprior::io
