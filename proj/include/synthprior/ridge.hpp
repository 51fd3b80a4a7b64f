#pragma once

// Ridge regression two ways: the penalised normal equations, and ordinary
// least squares on the design augmented with sqrt(lambda) * I pseudo-rows
// whose response is zero. Every coefficient is penalised, intercept included;
// centre the data first if the intercept should be left alone.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/error.hpp"
#include "synthprior/random.hpp"

namespace synthprior {

struct RidgeProblem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  double lambda = 0.0;

  void validate() const {
    if (x.rows() != y.size()) throw domain_error("RidgeProblem: X and y row counts differ");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw domain_error("RidgeProblem: lambda must be finite and >= 0");
    }
  }
};

/// Solves (X'X + lambda I) beta = X'y by Cholesky.
inline Eigen::VectorXd ridge_closed_form(const RidgeProblem& prob) {
  prob.validate();
  const Eigen::Index p = prob.x.cols();
  Eigen::MatrixXd normal = prob.x.transpose() * prob.x;
  normal.diagonal().array() += prob.lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    throw numeric_error("ridge_closed_form: X'X + lambda I is not positive definite");
  }
  Eigen::VectorXd beta = llt.solve(prob.x.transpose() * prob.y);
  if (beta.size() != p) throw numeric_error("ridge_closed_form: solve failed");
  return beta;
}

struct AugmentedLeastSquares {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

/// [X; sqrt(lambda) I] and [y; 0].
inline AugmentedLeastSquares ridge_augmented_system(const RidgeProblem& prob) {
  prob.validate();
  const Eigen::Index n = prob.x.rows();
  const Eigen::Index p = prob.x.cols();
  AugmentedLeastSquares sys{Eigen::MatrixXd(n + p, p), Eigen::VectorXd::Zero(n + p)};
  sys.x.topRows(n) = prob.x;
  sys.x.bottomRows(p) = std::sqrt(prob.lambda) * Eigen::MatrixXd::Identity(p, p);
  sys.y.head(n) = prob.y;
  return sys;
}

/// OLS on the augmented system, solved by column-pivoted QR.
inline Eigen::VectorXd ridge_augmented(const RidgeProblem& prob) {
  if (!(prob.lambda > 0.0)) throw domain_error("ridge_augmented: lambda must be > 0");
  const auto sys = ridge_augmented_system(prob);
  return sys.x.colPivHouseholderQr().solve(sys.y);
}

/// Largest |a_k - c_k| / max(|c|_inf, tiny) between two coefficient vectors.
inline double max_relative_deviation(const Eigen::VectorXd& candidate,
                                     const Eigen::VectorXd& reference) {
  const double scale = std::max(reference.cwiseAbs().maxCoeff(), 1e-300);
  return (candidate - reference).cwiseAbs().maxCoeff() / scale;
}

struct RidgeComparison {
  int instance = 0;
  Eigen::Index n = 0;
  Eigen::Index p = 0;
  double lambda = 0.0;
  double max_rel_deviation = 0.0;
};

/// Random Gaussian instances with n in [5, 50], p in [1, 10] (p <= n), each
/// solved both ways at every lambda.
inline std::vector<RidgeComparison> ridge_equivalence_study(std::uint64_t seed, int instances,
                                                            const std::vector<double>& lambdas) {
  RandomStream rng(seed, 0);
  std::vector<RidgeComparison> out;
  for (int i = 0; i < instances; ++i) {
    const Eigen::Index n = 5 + static_cast<Eigen::Index>(rng() % 46);
    const Eigen::Index p = std::min<Eigen::Index>(1 + static_cast<Eigen::Index>(rng() % 10), n);
    RidgeProblem prob{Eigen::MatrixXd(n, p), Eigen::VectorXd(n), 0.0};
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < p; ++c) prob.x(r, c) = rng.normal();
      prob.y[r] = rng.normal();
    }
    for (double lambda : lambdas) {
      prob.lambda = lambda;
      out.push_back({i, n, p, lambda,
                     max_relative_deviation(ridge_augmented(prob), ridge_closed_form(prob))});
    }
  }
  return out;
}

}  // namespace synthprior
