#pragma once

// The two worked analyses: a Phase II dose-finding replication study with an
// Emax truth fitted by a linear logit, and the pre-Challenger O-ring data.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/diagnostics.hpp"
#include "synthprior/error.hpp"
#include "synthprior/gibbs.hpp"
#include "synthprior/model.hpp"
#include "synthprior/prior.hpp"
#include "synthprior/random.hpp"

namespace synthprior {

inline constexpr std::uint64_t kDefaultSeed = 2024;

/// logit P(y = 1 | d) = e0 + span * d / (ed50 + d).
struct EmaxTruth {
  double e0 = logit(0.10);
  double span = logit(0.35) - logit(0.10);
  double ed50 = 0.5;

  static EmaxTruth from_probabilities(double p_placebo, double p_max, double ed50) {
    if (!(p_placebo > 0.0 && p_placebo < 1.0) || !(p_max > 0.0 && p_max < 1.0)) {
      throw domain_error("EmaxTruth: probabilities must lie in (0, 1)");
    }
    if (!(ed50 > 0.0)) throw domain_error("EmaxTruth: ed50 must be positive");
    return {logit(p_placebo), logit(p_max) - logit(p_placebo), ed50};
  }

  double asymptote() const { return sigmoid(e0 + span); }
};

inline double emax_prob(const EmaxTruth& truth, double dose) {
  if (!(dose >= 0.0)) throw domain_error("emax_prob: dose must be >= 0");
  return sigmoid(truth.e0 + truth.span * dose / (truth.ed50 + dose));
}

/// Design row (1, dose).
inline Eigen::VectorXd dose_row(double dose) { return Eigen::Vector2d(1.0, dose); }

struct TrialScenario {
  std::vector<double> doses{0.0, 0.5, 1.5, 2.5, 4.0};
  int per_arm = 60;
  EmaxTruth truth;
  BcjPrior prior = default_dose_prior();
  ChainConfig chain;
  int replicates = 30;
  double delta = 0.05;
  double level = 0.95;
  // Doses compared against placebo (dose 0); empty means every non-zero dose.
  std::vector<double> decision_doses;

  static BcjPrior default_dose_prior() {
    return BcjPrior({DesignPoint{dose_row(0.0), 1.0, 9.0}, DesignPoint{dose_row(4.0), 3.0, 7.0}});
  }

  std::vector<double> resolved_decision_doses() const {
    if (!decision_doses.empty()) return decision_doses;
    std::vector<double> out;
    for (double d : doses) {
      if (d != 0.0) out.push_back(d);
    }
    return out;
  }

  void validate() const {
    if (doses.empty()) throw domain_error("TrialScenario: no doses");
    for (std::size_t i = 0; i < doses.size(); ++i) {
      if (!(doses[i] >= 0.0)) throw domain_error("TrialScenario: doses must be non-negative");
      for (std::size_t j = 0; j < i; ++j) {
        if (doses[i] == doses[j]) throw domain_error("TrialScenario: doses must be distinct");
      }
    }
    if (std::find(doses.begin(), doses.end(), 0.0) == doses.end()) {
      throw domain_error("TrialScenario: a placebo arm (dose 0) is required");
    }
    if (per_arm < 1) throw domain_error("TrialScenario: per_arm must be >= 1");
    if (replicates < 1) throw domain_error("TrialScenario: replicates must be >= 1");
    if (!(truth.ed50 > 0.0)) throw domain_error("TrialScenario: ed50 must be positive");
    if (prior.dim() != 2) throw domain_error("TrialScenario: prior must be on (1, dose)");
    if (!(level > 0.0 && level < 1.0)) throw domain_error("TrialScenario: level in (0, 1)");
    for (double d : resolved_decision_doses()) {
      if (std::find(doses.begin(), doses.end(), d) == doses.end()) {
        throw domain_error("TrialScenario: decision dose " + std::to_string(d) +
                           " is not one of the trial doses");
      }
    }
    chain.validate();
  }
};

inline Dataset simulate_trial(const TrialScenario& scenario, RandomStream& rng) {
  const auto n_arms = static_cast<Eigen::Index>(scenario.doses.size());
  const Eigen::Index n = n_arms * scenario.per_arm;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  Eigen::Index row = 0;
  for (double d : scenario.doses) {
    const double p = emax_prob(scenario.truth, d);
    for (int i = 0; i < scenario.per_arm; ++i, ++row) {
      x(row, 0) = 1.0;
      x(row, 1) = d;
      y[row] = rng.bernoulli(p) ? 1.0 : 0.0;
    }
  }
  return {std::move(x), std::move(y)};
}

// Streams under the master seed: 3r for trial data, 3r + 1 for the BCJ
// chain, 3r + 2 for the flat chain of replicate r.
inline std::uint64_t trial_stream(int replicate) { return 3ULL * static_cast<std::uint64_t>(replicate); }
inline std::uint64_t bcj_stream(int replicate) { return trial_stream(replicate) + 1; }
inline std::uint64_t flat_stream(int replicate) { return trial_stream(replicate) + 2; }

/// One fitted prior within one replicate.
struct FitSummary {
  std::vector<double> mean;      // per dose
  std::vector<double> width;     // per dose
  std::vector<double> decision;  // per decision dose
  std::array<double, 2> ess{};
  std::array<double, 2> geweke{};
};

struct ReplicateResult {
  int index = 0;
  FitSummary bcj;
  FitSummary flat;
};

struct DoseRow {
  double dose = 0.0;
  double true_p = 0.0;
  double bcj_mean = 0.0;
  double flat_mean = 0.0;
  std::optional<double> bcj_sd;
  std::optional<double> flat_sd;
  double bcj_width = 0.0;
  double flat_width = 0.0;
};

struct DecisionRow {
  double dose = 0.0;
  double bcj = 0.0;
  double flat = 0.0;
};

struct DiagnosticsRow {
  std::string prior;
  std::string coefficient;
  double mean_ess = 0.0;
  int geweke_within_2 = 0;
  // Replicates where every coefficient of this fit has |z| <= 2.
  int geweke_all_within_2 = 0;
  int replicates = 0;
};

struct PlotPoint {
  double dose = 0.0;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string prior;
};

struct ReplicationReport {
  std::vector<DoseRow> doses;
  std::vector<DecisionRow> decisions;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<PlotPoint> plot;
  std::vector<ReplicateResult> replicates;
};

inline std::vector<double> plot_grid(const TrialScenario& scenario, int steps = 40) {
  const double top = *std::max_element(scenario.doses.begin(), scenario.doses.end());
  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) grid.push_back(top * i / steps);
  return grid;
}

namespace detail {

inline FitSummary summarize_fit(const PosteriorDraws& draws, const TrialScenario& scenario,
                                const std::vector<double>& grid, std::vector<double>& grid_mean,
                                std::vector<double>& grid_lo, std::vector<double>& grid_hi) {
  FitSummary fit;
  for (double d : scenario.doses) {
    const Eigen::VectorXd probs = probability_draws(draws, dose_row(d));
    fit.mean.push_back(probs.mean());
    fit.width.push_back(credible_interval(probs, scenario.level).width());
  }
  const Eigen::VectorXd placebo = dose_row(0.0);
  for (double d : scenario.resolved_decision_doses()) {
    fit.decision.push_back(decision_prob(draws, dose_row(d), placebo, scenario.delta));
  }
  for (Eigen::Index k = 0; k < 2; ++k) {
    const Eigen::VectorXd col = draws.column(k);
    fit.ess[static_cast<std::size_t>(k)] = ess(col);
    fit.geweke[static_cast<std::size_t>(k)] = geweke_z(col);
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const Eigen::VectorXd probs = probability_draws(draws, dose_row(grid[g]));
    const Interval ci = credible_interval(probs, scenario.level);
    grid_mean[g] += probs.mean();
    grid_lo[g] += ci.lo;
    grid_hi[g] += ci.hi;
  }
  return fit;
}

inline double across_mean(const std::vector<ReplicateResult>& reps,
                          auto&& pick) {
  double acc = 0.0;
  for (const auto& r : reps) acc += pick(r);
  return acc / static_cast<double>(reps.size());
}

inline std::optional<double> across_sd(const std::vector<ReplicateResult>& reps, auto&& pick) {
  if (reps.size() < 2) return std::nullopt;
  const double m = across_mean(reps, pick);
  double ss = 0.0;
  for (const auto& r : reps) ss += (pick(r) - m) * (pick(r) - m);
  return std::sqrt(ss / static_cast<double>(reps.size() - 1));
}

}  // namespace detail

/// Simulates one trial.
inline ReplicateResult run_replicate(const TrialScenario& scenario, int index,
                                     const std::vector<double>& grid,
                                     std::vector<double>* grid_acc_bcj = nullptr,
                                     std::vector<double>* grid_acc_flat = nullptr) {
  RandomStream data_rng(scenario.chain.seed, trial_stream(index));
  const Dataset data = simulate_trial(scenario, data_rng);

  const auto synthetic = to_synthetic(scenario.prior);
  const AugmentedDataset aug_bcj = augment(data, synthetic);
  const AugmentedDataset aug_flat = augment(data, std::vector<SyntheticObservation>{});

  ChainConfig cfg = scenario.chain;
  const std::vector<std::string> labels{"beta0", "beta1"};
  cfg.stream = bcj_stream(index);
  const PosteriorDraws bcj = run_chain(aug_bcj, cfg, labels);
  cfg.stream = flat_stream(index);
  const PosteriorDraws flat = run_chain(aug_flat, cfg, labels);

  const std::size_t g = grid.size();
  auto fill = [&](const PosteriorDraws& d, std::vector<double>* acc) {
    std::vector<double> m(g, 0.0), lo(g, 0.0), hi(g, 0.0);
    FitSummary s = detail::summarize_fit(d, scenario, grid, m, lo, hi);
    if (acc) {
      for (std::size_t i = 0; i < g; ++i) {
        (*acc)[i] = m[i];
        (*acc)[g + i] = lo[i];
        (*acc)[2 * g + i] = hi[i];
      }
    }
    return s;
  };
  ReplicateResult result;
  result.index = index;
  result.bcj = fill(bcj, grid_acc_bcj);
  result.flat = fill(flat, grid_acc_flat);
  return result;
}

/// Simulate, fit under the BCJ prior and under a flat prior, and aggregate
/// across replicates. Replicate r depends only on (seed, r), and aggregation
/// runs in replicate-index order, so the report is bit-reproducible.
inline ReplicationReport run_replications(const TrialScenario& scenario) {
  scenario.validate();
  const auto grid = plot_grid(scenario);
  const std::size_t g = grid.size();

  ReplicationReport report;
  std::vector<double> plot_bcj(3 * g, 0.0), plot_flat(3 * g, 0.0);
  std::vector<double> one_bcj(3 * g), one_flat(3 * g);
  for (int r = 0; r < scenario.replicates; ++r) {
    report.replicates.push_back(run_replicate(scenario, r, grid, &one_bcj, &one_flat));
    for (std::size_t i = 0; i < 3 * g; ++i) {
      plot_bcj[i] += one_bcj[i];
      plot_flat[i] += one_flat[i];
    }
  }
  const auto& reps = report.replicates;
  const double n_rep = static_cast<double>(reps.size());

  for (std::size_t k = 0; k < scenario.doses.size(); ++k) {
    DoseRow row;
    row.dose = scenario.doses[k];
    row.true_p = emax_prob(scenario.truth, row.dose);
    auto bcj_mean = [k](const ReplicateResult& r) { return r.bcj.mean[k]; };
    auto flat_mean = [k](const ReplicateResult& r) { return r.flat.mean[k]; };
    row.bcj_mean = detail::across_mean(reps, bcj_mean);
    row.flat_mean = detail::across_mean(reps, flat_mean);
    row.bcj_sd = detail::across_sd(reps, bcj_mean);
    row.flat_sd = detail::across_sd(reps, flat_mean);
    row.bcj_width = detail::across_mean(reps, [k](const ReplicateResult& r) { return r.bcj.width[k]; });
    row.flat_width =
        detail::across_mean(reps, [k](const ReplicateResult& r) { return r.flat.width[k]; });
    report.doses.push_back(row);
  }

  const auto decision_doses = scenario.resolved_decision_doses();
  for (std::size_t k = 0; k < decision_doses.size(); ++k) {
    report.decisions.push_back(
        {decision_doses[k],
         detail::across_mean(reps, [k](const ReplicateResult& r) { return r.bcj.decision[k]; }),
         detail::across_mean(reps, [k](const ReplicateResult& r) { return r.flat.decision[k]; })});
  }

  for (const std::string prior : {"bcj", "flat"}) {
    for (std::size_t c = 0; c < 2; ++c) {
      DiagnosticsRow row{prior, c == 0 ? "beta0" : "beta1", 0.0, 0, 0,
                         static_cast<int>(reps.size())};
      for (const auto& r : reps) {
        const FitSummary& fit = prior == "bcj" ? r.bcj : r.flat;
        row.mean_ess += fit.ess[c];
        if (std::abs(fit.geweke[c]) <= 2.0) ++row.geweke_within_2;
        if (std::abs(fit.geweke[0]) <= 2.0 && std::abs(fit.geweke[1]) <= 2.0) {
          ++row.geweke_all_within_2;
        }
      }
      row.mean_ess /= n_rep;
      report.diagnostics.push_back(row);
    }
  }

  for (std::size_t i = 0; i < g; ++i) {
    report.plot.push_back({grid[i], plot_bcj[i] / n_rep, plot_bcj[g + i] / n_rep,
                           plot_bcj[2 * g + i] / n_rep, "bcj"});
  }
  for (std::size_t i = 0; i < g; ++i) {
    report.plot.push_back({grid[i], plot_flat[i] / n_rep, plot_flat[g + i] / n_rep,
                           plot_flat[2 * g + i] / n_rep, "flat"});
  }
  for (std::size_t i = 0; i < g; ++i) {
    const double p = emax_prob(scenario.truth, grid[i]);
    report.plot.push_back({grid[i], p, p, p, "truth"});
  }
  return report;
}

// ---------------------------------------------------------------------------
// O-ring data
// ---------------------------------------------------------------------------

struct OringRow {
  double temperature = 0.0;
  int failure = 0;
};

struct OringData {
  std::vector<OringRow> rows;

  int failures() const {
    int n = 0;
    for (const auto& r : rows) n += r.failure;
    return n;
  }

  Dataset to_dataset() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      x(r, 0) = 1.0;
      x(r, 1) = rows[i].temperature;
      y[r] = rows[i].failure;
    }
    return {std::move(x), std::move(y)};
  }
};

/// Launch temperature (F) and whether at least one primary field-joint O-ring
/// failed, for the 23 flights before Challenger (Dalal, Fowlkes and Hoadley 1989).
inline OringData oring_dataset() {
  OringData data;
  for (double t : {53.0, 57.0, 58.0, 63.0, 70.0, 70.0, 75.0}) data.rows.push_back({t, 1});
  for (double t : {66.0, 67.0, 67.0, 67.0, 68.0, 69.0, 70.0, 70.0, 72.0, 73.0, 75.0, 76.0, 76.0,
                   78.0, 79.0, 81.0}) {
    data.rows.push_back({t, 0});
  }
  return data;
}

/// Beta(8, 2) at 31 F and Beta(1, 9) at 81 F.
inline BcjPrior oring_prior() {
  return BcjPrior({DesignPoint{Eigen::Vector2d(1.0, 31.0), 8.0, 2.0},
                   DesignPoint{Eigen::Vector2d(1.0, 81.0), 1.0, 9.0}});
}

inline const std::vector<double>& oring_temperatures() {
  static const std::vector<double> temps{31.0, 50.0, 65.0, 75.0, 81.0};
  return temps;
}

struct OringTableRow {
  std::string prior;
  double temperature = 0.0;
  double mean = 0.0;
  Interval interval;
};

struct OringTable {
  std::vector<OringTableRow> rows;

  const OringTableRow* find(const std::string& prior, double temperature) const {
    for (const auto& r : rows) {
      if (r.prior == prior && r.temperature == temperature) return &r;
    }
    return nullptr;
  }
};

inline constexpr std::uint64_t kOringBcjStream = 1;
inline constexpr std::uint64_t kOringFlatStream = 2;

/// Posterior failure probability at 31, 50, 65, 75 and 81 F under the BCJ
/// prior and a flat prior (no synthetic rows).
inline OringTable oring_analysis(const ChainConfig& chain, bool flat_only = false,
                                 double level = 0.95) {
  const Dataset data = oring_dataset().to_dataset();
  const std::vector<std::string> labels{"intercept", "temperature"};
  OringTable table;

  auto add_rows = [&](const std::string& name, const PosteriorDraws& draws) {
    for (double t : oring_temperatures()) {
      const Eigen::VectorXd probs = probability_draws(draws, Eigen::Vector2d(1.0, t));
      table.rows.push_back({name, t, probs.mean(), credible_interval(probs, level)});
    }
  };

  ChainConfig cfg = chain;
  if (!flat_only) {
    cfg.stream = kOringBcjStream;
    add_rows("bcj", run_chain(augment(data, to_synthetic(oring_prior())), cfg, labels));
  }
  cfg.stream = kOringFlatStream;
  add_rows("flat", run_chain(augment(data, std::vector<SyntheticObservation>{}), cfg, labels));
  return table;
}

}  // namespace synthprior
