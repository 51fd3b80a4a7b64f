#pragma once

// Two-step Polya-Gamma Gibbs sampler for logistic regression on an augmented
// (real + synthetic) dataset:
//
//   1. omega_i | beta ~ PG(b_i, x_i' beta)
//   2. beta | omega   ~ N(m, V),  V^{-1} = X' Omega X,  m = V X' kappa
//
// Both steps are exact draws, so every iteration is kept (no accept/reject).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/error.hpp"
#include "synthprior/model.hpp"
#include "synthprior/polya_gamma.hpp"
#include "synthprior/random.hpp"

namespace synthprior {

struct ChainConfig {
  long iterations = 10000;
  long burn_in = 3000;
  long thin = 1;
  std::uint64_t seed = 2024;
  // Stream index under `seed`; replicates and sibling chains use distinct values.
  std::uint64_t stream = 0;
  std::optional<Eigen::VectorXd> initial_beta;

  void validate() const {
    if (iterations < 1) throw domain_error("ChainConfig: iterations must be positive");
    // burn_in == iterations is allowed and yields an empty draw set.
    if (burn_in < 0 || burn_in > iterations) {
      throw domain_error("ChainConfig: need 0 <= burn_in <= iterations");
    }
    if (thin < 1) throw domain_error("ChainConfig: thin must be >= 1");
  }

  long kept() const { return (iterations - burn_in) / thin; }
};

struct PosteriorDraws {
  Eigen::MatrixXd draws;  // kept x p
  ChainConfig config;
  std::vector<std::string> labels;
  long iterations_run = 0;
  bool approximate_pg = false;

  Eigen::Index kept() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }
  Eigen::VectorXd column(Eigen::Index k) const { return draws.col(k); }
};

inline std::vector<std::string> default_labels(Eigen::Index p) {
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < p; ++k) labels.push_back("beta" + std::to_string(k));
  return labels;
}

inline Eigen::VectorXd step_omega(const AugmentedDataset& aug, const Eigen::VectorXd& beta,
                                  RandomStream& rng) {
  if (beta.size() != aug.dim()) throw domain_error("step_omega: beta has wrong length");
  const Eigen::VectorXd eta = aug.design() * beta;
  Eigen::VectorXd omega(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) omega[i] = sample_pg(aug.trials()[i], eta[i], rng);
  return omega;
}

/// X' diag(omega) X over a block of rows.
template <typename Design, typename Weights>
Eigen::MatrixXd weighted_gram(const Design& x, const Weights& omega) {
  return x.transpose() * omega.asDiagonal() * x;
}

struct PrecisionParts {
  Eigen::MatrixXd real;
  Eigen::MatrixXd synthetic;
};

/// Splits X' Omega X into the contribution of real rows and of synthetic rows.
inline PrecisionParts precision_parts(const AugmentedDataset& aug, const Eigen::VectorXd& omega) {
  const Eigen::Index n = aug.n_real();
  return {weighted_gram(aug.real_design(), omega.head(n)),
          weighted_gram(aug.synthetic_design(), omega.tail(aug.n_synthetic()))};
}

inline Eigen::MatrixXd precision(const AugmentedDataset& aug, const Eigen::VectorXd& omega) {
  return weighted_gram(aug.design(), omega);
}

/// Conditional mean m solving (X' Omega X) m = X' kappa.
inline Eigen::VectorXd conditional_mean(const AugmentedDataset& aug,
                                        const Eigen::VectorXd& omega) {
  Eigen::LLT<Eigen::MatrixXd> llt(precision(aug, omega));
  if (llt.info() != Eigen::Success) throw numeric_error("conditional_mean: precision not SPD");
  return llt.solve(aug.design().transpose() * aug.kappa());
}

inline Eigen::VectorXd step_beta(const AugmentedDataset& aug, const Eigen::VectorXd& omega,
                                 RandomStream& rng) {
  if (omega.size() != aug.rows()) throw domain_error("step_beta: omega has wrong length");
  if ((omega.array() <= 0.0).any()) throw domain_error("step_beta: omega must be positive");

  Eigen::LLT<Eigen::MatrixXd> llt(precision(aug, omega));
  if (llt.info() != Eigen::Success) {
    throw numeric_error("step_beta: Cholesky of X' Omega X failed (rank-deficient design?)");
  }
  Eigen::VectorXd beta = llt.solve(aug.design().transpose() * aug.kappa());
  Eigen::VectorXd noise(aug.dim());
  for (Eigen::Index k = 0; k < noise.size(); ++k) noise[k] = rng.normal();
  // L L' = P, so L'^{-1} z has covariance P^{-1}.
  beta += llt.matrixU().solve(noise);
  return beta;
}

inline PosteriorDraws run_chain(const AugmentedDataset& aug, const ChainConfig& config,
                                std::vector<std::string> labels = {}) {
  config.validate();
  const Eigen::Index p = aug.dim();
  if (labels.empty()) labels = default_labels(p);
  if (static_cast<Eigen::Index>(labels.size()) != p) {
    throw domain_error("run_chain: label count does not match dimension");
  }

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  if (config.initial_beta) {
    if (config.initial_beta->size() != p) throw domain_error("run_chain: initial_beta length");
    beta = *config.initial_beta;
  }

  RandomStream rng(config.seed, config.stream);
  PosteriorDraws out;
  out.config = config;
  out.labels = std::move(labels);
  out.approximate_pg = !aug.all_trials_integer();
  out.draws.resize(config.kept(), p);

  Eigen::Index kept = 0;
  for (long t = 0; t < config.iterations; ++t) {
    const Eigen::VectorXd omega = step_omega(aug, beta, rng);
    beta = step_beta(aug, omega, rng);
    ++out.iterations_run;
    const long post = t - config.burn_in;
    if (post >= 0 && post % config.thin == 0 && kept < out.draws.rows()) {
      out.draws.row(kept++) = beta.transpose();
    }
  }
  return out;
}

}  // namespace synthprior
