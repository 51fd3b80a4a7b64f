#pragma once

// Command-line front end. Parsing produces a fully resolved JSON config per
// subcommand; execution consumes only that config. The same config is written
// to manifest.json, so `replay` re-runs a command from its manifest alone.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "synthprior/diagnostics.hpp"
#include "synthprior/error.hpp"
#include "synthprior/gibbs.hpp"
#include "synthprior/io.hpp"
#include "synthprior/model.hpp"
#include "synthprior/prior.hpp"
#include "synthprior/ridge.hpp"
#include "synthprior/scenarios.hpp"

namespace synthprior::cli {

namespace fs = std::filesystem;
using io::json;

inline constexpr const char* kToolName = "synthprior";
inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "SYNTHPRIOR_OUT_DIR";

// Exit codes; 0 is success.
enum ExitCode : int {
  kExitUsage = 2,
  kExitParse = 3,
  kExitDomain = 4,
  kExitRank = 5,
  kExitIo = 6,
  kExitNumeric = 7,
  kExitInternal = 10,
};

inline int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::domain: return kExitDomain;
    case ErrorKind::rank: return kExitRank;
    case ErrorKind::io: return kExitIo;
    case ErrorKind::numeric: return kExitNumeric;
  }
  return kExitInternal;
}

inline std::string default_out_dir() {
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

inline std::string absolute(const std::string& path) {
  return path.empty() ? path : fs::absolute(path).lexically_normal().string();
}

struct RunResult {
  std::vector<std::string> artifacts;
  std::string report;  // printed to stdout
};

inline void write_manifest(const std::string& command, const json& config, RunResult& result) {
  const fs::path dir = config.at("out_dir").get<std::string>();
  json artifacts = json::array();
  for (const auto& a : result.artifacts) artifacts.push_back(a);
  json manifest = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"subcommand", command},
                   {"seed", config.contains("chain") ? config["chain"]["seed"]
                            : config.contains("scenario") ? config["scenario"]["chain"]["seed"]
                            : config.value("seed", json(nullptr))},
                   {"config", config},
                   {"artifacts", artifacts}};
  const fs::path path = dir / "manifest.json";
  io::write_text(path, manifest.dump(2) + "\n");
  result.artifacts.push_back(path.string());
}

inline std::vector<Eigen::VectorXd> query_points(const json& config, const BcjPrior* prior,
                                                 const Dataset& data) {
  std::vector<Eigen::VectorXd> points;
  if (config.contains("query") && !config["query"].empty()) {
    for (const auto& q : config["query"]) points.push_back(io::to_vector(q.get<std::vector<double>>()));
    return points;
  }
  if (prior) {
    for (const auto& pt : prior->points()) points.push_back(pt.x_tilde);
    return points;
  }
  // Distinct data rows in first-seen order.
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd row = data.x.row(i).transpose();
    bool seen = false;
    for (const auto& p : points) seen = seen || p == row;
    if (!seen) points.push_back(row);
  }
  return points;
}

inline RunResult run_fit(const json& config) {
  const bool intercept = config.at("intercept").get<bool>();
  const std::string data_path = config.at("data").get<std::string>();
  const auto labeled = io::parse_data_csv(io::read_text(data_path), intercept, data_path);

  std::optional<BcjPrior> prior;
  if (!config.at("prior").is_null()) {
    const std::string prior_path = config.at("prior").get<std::string>();
    prior = io::parse_prior(io::read_text(prior_path), prior_path);
    if (prior->dim() != labeled.data.dim()) {
      throw domain_error("prior covariates have length " + std::to_string(prior->dim()) +
                         " but the design has " + std::to_string(labeled.data.dim()) +
                         " columns (include the intercept term explicitly)");
    }
  }

  const auto synthetic = prior ? to_synthetic(*prior) : std::vector<SyntheticObservation>{};
  const AugmentedDataset aug = augment(labeled.data, synthetic);
  const ChainConfig chain = io::chain_from_json(config.at("chain"));
  const PosteriorDraws draws = run_chain(aug, chain, labeled.labels);

  const auto points = query_points(config, prior ? &*prior : nullptr, labeled.data);
  for (const auto& q : points) {
    if (q.size() != labeled.data.dim()) throw domain_error("query point has wrong length");
  }
  const double level = config.at("level").get<double>();
  const ChainSummary summary = summarize(draws, points, level);

  json out = io::summary_to_json(summary);
  out["kept"] = draws.kept();
  out["approximate_pg"] = draws.approximate_pg;
  out["n_real"] = aug.n_real();
  out["n_synthetic"] = aug.n_synthetic();
  if (prior) {
    const PriorReport rep = validate_prior(*prior);
    out["prior_report"] = {{"rank", rep.rank},
                           {"proper", rep.proper},
                           {"over_determined", rep.over_determined},
                           {"under_determined", rep.under_determined},
                           {"messages", rep.messages}};
  }

  const fs::path dir = config.at("out_dir").get<std::string>();
  RunResult result;
  io::write_text(dir / "draws.csv", io::draws_to_csv(draws));
  io::write_text(dir / "summary.json", out.dump(2) + "\n");
  io::write_text(dir / "coefficients.csv", io::coefficient_table_csv(summary.coefficients));
  result.artifacts = {(dir / "draws.csv").string(), (dir / "summary.json").string(),
                      (dir / "coefficients.csv").string()};
  result.report = io::coefficient_table_csv(summary.coefficients);
  return result;
}

inline RunResult run_simulate(const json& config) {
  const TrialScenario scenario = io::scenario_from_json(config.at("scenario"), "scenario");
  const ReplicationReport report = run_replications(scenario);
  const fs::path dir = config.at("out_dir").get<std::string>();
  RunResult result;
  const std::vector<std::pair<std::string, std::string>> files{
      {"table3.csv", io::table3_csv(report)},
      {"table4.csv", io::table4_csv(report)},
      {"diagnostics.csv", io::diagnostics_csv(report)},
      {"fig1_plot.tsv", io::plot_tsv(report)}};
  for (const auto& [name, text] : files) {
    io::write_text(dir / name, text);
    result.artifacts.push_back((dir / name).string());
  }
  result.report = io::table3_csv(report) + "\n" + io::table4_csv(report) + "\n" +
                  io::diagnostics_csv(report);
  return result;
}

inline RunResult run_oring(const json& config) {
  const ChainConfig chain = io::chain_from_json(config.at("chain"));
  const OringTable table = oring_analysis(chain, config.at("flat_only").get<bool>());
  const fs::path dir = config.at("out_dir").get<std::string>();
  RunResult result;
  io::write_text(dir / "table5.csv", io::table5_csv(table));
  result.artifacts.push_back((dir / "table5.csv").string());
  result.report = io::table5_csv(table);
  return result;
}

inline RunResult run_ridge_demo(const json& config) {
  const auto lambdas = config.at("lambdas").get<std::vector<double>>();
  const auto rows = ridge_equivalence_study(config.at("seed").get<std::uint64_t>(),
                                            config.at("instances").get<int>(), lambdas);
  std::string csv = "instance,n,p,lambda,max_rel_deviation\n";
  double worst = 0.0;
  for (const auto& r : rows) {
    char dev[32];
    std::snprintf(dev, sizeof dev, "%.3e", r.max_rel_deviation);
    csv += std::to_string(r.instance) + "," + std::to_string(r.n) + "," + std::to_string(r.p) +
           "," + io::fixed(r.lambda, 3) + "," + dev + "\n";
    worst = std::max(worst, r.max_rel_deviation);
  }
  const fs::path dir = config.at("out_dir").get<std::string>();
  RunResult result;
  io::write_text(dir / "ridge_demo.csv", csv);
  result.artifacts.push_back((dir / "ridge_demo.csv").string());
  char line[128];
  std::snprintf(line, sizeof line, "%zu comparisons, max relative deviation %.3e (%s 1e-10)\n",
                rows.size(), worst, worst < 1e-10 ? "<" : ">=");
  result.report = line;
  return result;
}

inline RunResult run_diagnose(const json& config) {
  const std::string path = config.at("draws").get<std::string>();
  const PosteriorDraws draws = io::draws_from_csv(io::read_text(path), path);
  std::vector<CoefficientSummary> rows;
  for (Eigen::Index k = 0; k < draws.dim(); ++k) {
    rows.push_back(summarize_series(draws.labels[static_cast<std::size_t>(k)], draws.column(k)));
  }
  const fs::path dir = config.at("out_dir").get<std::string>();
  RunResult result;
  io::write_text(dir / "diagnostics.csv", io::coefficient_table_csv(rows));
  result.artifacts.push_back((dir / "diagnostics.csv").string());
  result.report = io::coefficient_table_csv(rows);
  return result;
}

/// Runs a resolved config and writes its manifest.
inline RunResult execute(const std::string& command, const json& config) {
  RunResult result;
  if (command == "fit") result = run_fit(config);
  else if (command == "simulate") result = run_simulate(config);
  else if (command == "oring") result = run_oring(config);
  else if (command == "ridge-demo") result = run_ridge_demo(config);
  else if (command == "diagnose") result = run_diagnose(config);
  else throw parse_error("unknown subcommand '" + command + "'");
  write_manifest(command, config, result);
  return result;
}

struct ChainFlags {
  long iters = 10000;
  long burnin = 3000;
  long thin = 1;
  std::uint64_t seed = kDefaultSeed;
  CLI::Option* iters_opt = nullptr;
  CLI::Option* burnin_opt = nullptr;
  CLI::Option* thin_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App* app) {
    iters_opt = app->add_option("--iters", iters, "Gibbs iterations")->capture_default_str();
    burnin_opt = app->add_option("--burnin", burnin, "Burn-in iterations")->capture_default_str();
    thin_opt = app->add_option("--thin", thin, "Keep every k-th draw")->capture_default_str();
    seed_opt = app->add_option("--seed", seed, "Master seed")->capture_default_str();
  }

  json to_json() const {
    return {{"iterations", iters}, {"burn_in", burnin}, {"thin", thin}, {"seed", seed}};
  }
};

/// Parses argv and runs. Returns the process exit status.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Synthetic conditional-means priors for Bayesian logistic regression", kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  std::string out_dir = default_out_dir();
  auto add_out_dir = [&](CLI::App* sub) {
    sub->add_option("--out-dir", out_dir, "Output directory (default $SYNTHPRIOR_OUT_DIR or ./out)");
  };

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a logistic regression with an optional BCJ prior");
  std::string data_path, prior_path;
  bool no_intercept = false;
  std::vector<std::string> queries;
  double level = 0.95;
  ChainFlags fit_chain;
  fit->add_option("--data", data_path, "Data CSV with a 'y' column")->required();
  fit->add_option("--prior", prior_path, "Prior JSON; omit for a flat prior");
  fit->add_flag("--no-intercept", no_intercept, "Do not prepend an intercept column");
  fit->add_option("--query", queries,
                  "Covariates (comma separated, intercept excluded) to summarise; repeatable");
  fit->add_option("--level", level, "Credible level")->capture_default_str();
  fit_chain.attach(fit);
  add_out_dir(fit);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Dose-finding replication study");
  std::string scenario_path;
  int reps = 30;
  ChainFlags sim_chain;
  sim->add_option("--scenario", scenario_path, "Scenario JSON; defaults to the built-in study");
  auto* reps_opt = sim->add_option("--reps", reps, "Replicates")->capture_default_str();
  sim_chain.attach(sim);
  add_out_dir(sim);

  // oring
  auto* oring = app.add_subcommand("oring", "Challenger O-ring analysis");
  bool flat_only = false;
  ChainFlags oring_chain;
  oring->add_flag("--flat-only", flat_only, "Only fit the flat prior");
  oring_chain.attach(oring);
  add_out_dir(oring);

  // ridge-demo
  auto* ridge = app.add_subcommand("ridge-demo", "Ridge closed form vs augmented OLS");
  std::uint64_t ridge_seed = kDefaultSeed;
  int instances = 50;
  ridge->add_option("--seed", ridge_seed, "Seed")->capture_default_str();
  ridge->add_option("--instances", instances, "Random instances")->capture_default_str();
  add_out_dir(ridge);

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "ESS and Geweke z for a draws CSV");
  std::string draws_path;
  diag->add_option("--draws", draws_path, "Draws CSV (header of coefficient names)")->required();
  add_out_dir(diag);

  // replay
  auto* replay = app.add_subcommand("replay", "Re-run a command from its manifest.json");
  std::string manifest_path;
  replay->add_option("manifest", manifest_path, "Path to manifest.json")->required();
  auto* replay_out = replay->add_option("--out-dir", out_dir, "Write outputs here instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    std::string command;
    json config;
    if (fit->parsed()) {
      command = "fit";
      json query = json::array();
      for (const auto& q : queries) {
        std::vector<double> v;
        if (!no_intercept) v.push_back(1.0);
        for (const auto& f : io::split(q, ',')) {
          double d;
          if (!io::parse_double(f, d)) throw parse_error("--query: bad number '" + f + "'");
          v.push_back(d);
        }
        query.push_back(v);
      }
      config = {{"data", absolute(data_path)},
                {"prior", prior_path.empty() ? json(nullptr) : json(absolute(prior_path))},
                {"intercept", !no_intercept},
                {"chain", fit_chain.to_json()},
                {"level", level},
                {"query", query}};
    } else if (sim->parsed()) {
      command = "simulate";
      TrialScenario scenario;
      scenario.chain.seed = kDefaultSeed;
      if (!scenario_path.empty()) {
        scenario = io::parse_scenario(io::read_text(scenario_path), scenario_path);
      }
      if (*reps_opt) scenario.replicates = reps;
      if (*sim_chain.iters_opt) scenario.chain.iterations = sim_chain.iters;
      if (*sim_chain.burnin_opt) scenario.chain.burn_in = sim_chain.burnin;
      if (*sim_chain.thin_opt) scenario.chain.thin = sim_chain.thin;
      if (*sim_chain.seed_opt) scenario.chain.seed = sim_chain.seed;
      scenario.validate();
      config = {{"scenario", io::scenario_to_json(scenario)}};
    } else if (oring->parsed()) {
      command = "oring";
      config = {{"chain", oring_chain.to_json()}, {"flat_only", flat_only}};
    } else if (ridge->parsed()) {
      command = "ridge-demo";
      config = {{"seed", ridge_seed},
                {"instances", instances},
                {"lambdas", std::vector<double>{1e-3, 1.0, 1e3}}};
    } else if (diag->parsed()) {
      command = "diagnose";
      config = {{"draws", absolute(draws_path)}};
    } else if (replay->parsed()) {
      const json manifest = io::parse_json(io::read_text(manifest_path), manifest_path);
      if (!manifest.contains("subcommand") || !manifest.contains("config")) {
        throw parse_error(manifest_path + ": not a manifest");
      }
      command = manifest.at("subcommand").get<std::string>();
      config = manifest.at("config");
      if (*replay_out) config["out_dir"] = absolute(out_dir);
    }
    if (!config.contains("out_dir")) config["out_dir"] = absolute(out_dir);

    const RunResult result = execute(command, config);
    out << result.report;
    return 0;
  } catch (const Error& e) {
    err << "error[" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace synthprior::cli
