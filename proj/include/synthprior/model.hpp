#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/error.hpp"
#include "synthprior/prior.hpp"

namespace synthprior {

/// log(1 + e^t) without overflow for large |t|.
inline double log1p_exp(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Bernoulli responses y with design X (n x p).
struct Dataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;

  Dataset() = default;
  Dataset(Eigen::MatrixXd design, Eigen::VectorXd response)
      : x(std::move(design)), y(std::move(response)) {
    if (x.rows() != y.size()) {
      throw domain_error("Dataset: design has " + std::to_string(x.rows()) +
                         " rows but response has " + std::to_string(y.size()));
    }
    if (!x.allFinite()) throw domain_error("Dataset: design must be finite");
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0) {
        throw domain_error("Dataset: response at row " + std::to_string(i) + " is not 0/1");
      }
    }
  }

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index dim() const { return x.cols(); }
};

struct AugmentedRow {
  Eigen::VectorXd x;
  double b = 1.0;
  double kappa = 0.0;

  double successes() const { return kappa + b / 2.0; }
};

/// Real rows followed by synthetic rows, stored column-major for the sampler.
/// kappa_i = successes_i - b_i / 2 is fixed for the life of the object.
class AugmentedDataset {
 public:
  AugmentedDataset(Eigen::MatrixXd x, Eigen::VectorXd b, Eigen::VectorXd kappa,
                   Eigen::Index n_real)
      : x_(std::move(x)), b_(std::move(b)), kappa_(std::move(kappa)), n_real_(n_real) {
    check_full_rank();
  }

  const Eigen::MatrixXd& design() const { return x_; }
  const Eigen::VectorXd& trials() const { return b_; }
  const Eigen::VectorXd& kappa() const { return kappa_; }
  Eigen::Index dim() const { return x_.cols(); }
  Eigen::Index rows() const { return x_.rows(); }
  Eigen::Index n_real() const { return n_real_; }
  Eigen::Index n_synthetic() const { return x_.rows() - n_real_; }

  AugmentedRow row(Eigen::Index i) const { return {x_.row(i).transpose(), b_[i], kappa_[i]}; }

  auto real_design() const { return x_.topRows(n_real_); }
  auto synthetic_design() const { return x_.bottomRows(n_synthetic()); }

  bool all_trials_integer() const {
    for (Eigen::Index i = 0; i < b_.size(); ++i) {
      if (std::floor(b_[i]) != b_[i]) return false;
    }
    return true;
  }

 private:
  void check_full_rank() const {
    const Eigen::Index p = x_.cols();
    if (x_.rows() == 0 || p == 0) throw rank_error("augment: empty design");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x_, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * sv[0];
    std::vector<Eigen::Index> null_dirs;
    for (Eigen::Index k = 0; k < p; ++k) {
      if (k >= sv.size() || sv[k] <= tol) null_dirs.push_back(k);
    }
    if (null_dirs.empty()) return;

    std::ostringstream msg;
    msg << "augment: stacked design has rank " << (p - static_cast<Eigen::Index>(null_dirs.size()))
        << " < " << p << "; deficient directions:";
    Eigen::IOFormat fmt(6, Eigen::DontAlignCols, ", ", ", ", "", "", "(", ")");
    for (auto k : null_dirs) msg << ' ' << svd.matrixV().col(k).transpose().format(fmt);
    throw rank_error(msg.str());
  }

  Eigen::MatrixXd x_;
  Eigen::VectorXd b_;
  Eigen::VectorXd kappa_;
  Eigen::Index n_real_ = 0;
};

/// Stack real Bernoulli rows (b = 1, kappa = y - 1/2) above synthetic binomial
/// rows (b = n_j, kappa = a_j - n_j / 2). Throws a rank error if the stacked
/// design does not have full column rank.
inline AugmentedDataset augment(const Dataset& data,
                                std::span<const SyntheticObservation> synthetic) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.dim();
  const auto m = static_cast<Eigen::Index>(synthetic.size());

  Eigen::MatrixXd x(n + m, p);
  Eigen::VectorXd b(n + m);
  Eigen::VectorXd kappa(n + m);
  x.topRows(n) = data.x;
  b.head(n).setOnes();
  kappa.head(n) = data.y.array() - 0.5;

  for (Eigen::Index j = 0; j < m; ++j) {
    const auto& obs = synthetic[static_cast<std::size_t>(j)];
    if (obs.x.size() != p) {
      throw domain_error("augment: synthetic row " + std::to_string(j) + " has length " +
                         std::to_string(obs.x.size()) + ", data have " + std::to_string(p) +
                         " columns");
    }
    if (!(obs.trials > 0.0) || obs.successes < 0.0 || obs.successes > obs.trials) {
      throw domain_error("augment: synthetic row " + std::to_string(j) +
                         " needs trials > 0 and 0 <= successes <= trials");
    }
    x.row(n + j) = obs.x.transpose();
    b[n + j] = obs.trials;
    kappa[n + j] = obs.successes - obs.trials / 2.0;
  }
  return {std::move(x), std::move(b), std::move(kappa), n};
}

inline AugmentedDataset augment(const Dataset& data,
                                const std::vector<SyntheticObservation>& synthetic) {
  return augment(data, std::span<const SyntheticObservation>(synthetic));
}

/// Unnormalised log posterior: sum over rows of s x'beta - b log(1 + e^{x'beta}).
inline double log_posterior(const Eigen::VectorXd& beta, const AugmentedDataset& aug) {
  if (beta.size() != aug.dim()) throw domain_error("log_posterior: beta has wrong length");
  const Eigen::VectorXd eta = aug.design() * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double b = aug.trials()[i];
    const double s = aug.kappa()[i] + b / 2.0;
    total += s * eta[i] - b * log1p_exp(eta[i]);
  }
  return total;
}

inline Eigen::VectorXd log_posterior_gradient(const Eigen::VectorXd& beta,
                                              const AugmentedDataset& aug) {
  if (beta.size() != aug.dim()) throw domain_error("log_posterior_gradient: wrong length");
  const Eigen::VectorXd eta = aug.design() * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    const double b = aug.trials()[i];
    resid[i] = aug.kappa()[i] + b / 2.0 - b * sigmoid(eta[i]);
  }
  return aug.design().transpose() * resid;
}

/// Bernoulli log-likelihood of the real data alone.
inline double log_likelihood(const Eigen::VectorXd& beta, const Dataset& data) {
  const Eigen::VectorXd eta = data.x * beta;
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) total += data.y[i] * eta[i] - log1p_exp(eta[i]);
  return total;
}

/// Log kernel of the induced prior on beta: sum_j a_j x_j'beta - n_j log(1 + e^{x_j'beta}).
inline double log_prior_kernel(const Eigen::VectorXd& beta, const BcjPrior& prior) {
  double total = 0.0;
  for (const auto& pt : prior.points()) {
    const double eta = pt.x_tilde.dot(beta);
    total += pt.a * eta - pt.weight() * log1p_exp(eta);
  }
  return total;
}

inline double predict_prob(const Eigen::VectorXd& beta, const Eigen::VectorXd& x) {
  if (beta.size() != x.size()) throw domain_error("predict_prob: length mismatch");
  return sigmoid(x.dot(beta));
}

}  // namespace synthprior
