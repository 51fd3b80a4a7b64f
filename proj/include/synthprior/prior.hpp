#pragma once

// Conditional-means (BCJ) priors: Beta beliefs about the response probability
// at chosen design points, and their conversion into binomial pseudo-data.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/error.hpp"

namespace synthprior {

/// Beta(a, b) belief about the success probability at covariate vector x_tilde.
struct DesignPoint {
  Eigen::VectorXd x_tilde;
  double a = 1.0;
  double b = 1.0;

  double weight() const { return a + b; }
  double mean() const { return a / (a + b); }
};

class BcjPrior {
 public:
  BcjPrior() = default;

  explicit BcjPrior(std::vector<DesignPoint> points) : points_(std::move(points)) {
    if (points_.empty()) throw domain_error("BcjPrior: at least one design point is required");
    dim_ = points_.front().x_tilde.size();
    for (std::size_t j = 0; j < points_.size(); ++j) {
      const auto& pt = points_[j];
      if (pt.x_tilde.size() != dim_) {
        throw domain_error("BcjPrior: design point " + std::to_string(j) + " has length " +
                           std::to_string(pt.x_tilde.size()) + ", expected " +
                           std::to_string(dim_));
      }
      if (!pt.x_tilde.allFinite()) {
        throw domain_error("BcjPrior: design point " + std::to_string(j) + " is not finite");
      }
      if (!(pt.a > 0.0) || !(pt.b > 0.0) || !std::isfinite(pt.a) || !std::isfinite(pt.b)) {
        throw domain_error("BcjPrior: design point " + std::to_string(j) +
                           " needs a > 0 and b > 0");
      }
    }
  }

  const std::vector<DesignPoint>& points() const { return points_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  /// Design matrix with one row per design point.
  Eigen::MatrixXd design() const {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(points_.size()), dim_);
    for (std::size_t j = 0; j < points_.size(); ++j) {
      x.row(static_cast<Eigen::Index>(j)) = points_[j].x_tilde.transpose();
    }
    return x;
  }

 private:
  std::vector<DesignPoint> points_;
  Eigen::Index dim_ = 0;
};

/// A binomial pseudo-observation: `successes` out of `trials` at covariates x.
struct SyntheticObservation {
  Eigen::VectorXd x;
  double trials = 0.0;
  double successes = 0.0;
};

inline DesignPoint elicit_from_mean_and_weight(double mean, double weight,
                                               const Eigen::VectorXd& x_tilde) {
  if (!(mean > 0.0 && mean < 1.0)) {
    throw domain_error("elicit_from_mean_and_weight: mean must lie strictly inside (0, 1)");
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw domain_error("elicit_from_mean_and_weight: weight must be positive");
  }
  return DesignPoint{x_tilde, mean * weight, (1.0 - mean) * weight};
}

inline std::vector<SyntheticObservation> to_synthetic(const BcjPrior& prior) {
  std::vector<SyntheticObservation> rows;
  rows.reserve(prior.size());
  for (const auto& pt : prior.points()) rows.push_back({pt.x_tilde, pt.a + pt.b, pt.a});
  return rows;
}

/// Numerical rank with relative threshold 1e-10 on the largest pivot.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& x) {
  if (x.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  return qr.rank();
}

struct PriorReport {
  Eigen::Index rank = 0;
  Eigen::Index dim = 0;
  std::size_t count = 0;
  bool full_rank = false;
  bool weights_at_least_one = false;
  bool proper = false;
  bool over_determined = false;
  bool under_determined = false;
  std::vector<std::string> messages;
};

/// Properness report for a prior on its own. Nothing is enforced here; the
/// stacked design is checked separately when the data are augmented.
inline PriorReport validate_prior(const BcjPrior& prior) {
  PriorReport report;
  report.dim = prior.dim();
  report.count = prior.size();
  if (prior.empty()) {
    report.under_determined = report.dim > 0;
    report.messages.emplace_back("prior has no design points");
    return report;
  }
  report.rank = numerical_rank(prior.design());
  report.full_rank = report.rank == report.dim;
  report.weights_at_least_one =
      std::all_of(prior.points().begin(), prior.points().end(),
                  [](const DesignPoint& pt) { return pt.weight() >= 1.0; });
  report.proper = report.full_rank && report.weights_at_least_one;
  report.over_determined = static_cast<Eigen::Index>(report.count) > report.dim;
  report.under_determined = report.rank < report.dim;

  if (report.under_determined) {
    report.messages.push_back("design rank " + std::to_string(report.rank) + " < " +
                              std::to_string(report.dim) +
                              ": prior is improper on its own; the posterior may still be "
                              "proper once data are added");
  }
  if (!report.weights_at_least_one) {
    report.messages.emplace_back("some design point has weight a + b < 1");
  }
  if (report.over_determined) {
    report.messages.push_back(std::to_string(report.count) + " design points for " +
                              std::to_string(report.dim) +
                              " coefficients: over-determined, acts like a ridge penalty "
                              "centred at the elicited means");
  }
  return report;
}

struct BetaPosterior {
  double a = 0.0;
  double b = 0.0;
  double mean = 0.0;
};

/// Conjugate Beta-Binomial update. The mean is the precision-weighted average
/// of the prior mean and s / n with weights (a + b) and n.
inline BetaPosterior beta_binomial_posterior(double a, double b, long successes, long n) {
  if (!(a > 0.0) || !(b > 0.0)) throw domain_error("beta_binomial_posterior: a, b must be > 0");
  if (successes < 0 || n < successes) {
    throw domain_error("beta_binomial_posterior: need 0 <= successes <= n");
  }
  const double a_post = a + static_cast<double>(successes);
  const double b_post = b + static_cast<double>(n - successes);
  return {a_post, b_post, a_post / (a_post + b_post)};
}

}  // namespace synthprior
