#pragma once

// Chain diagnostics and posterior summaries.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "synthprior/error.hpp"
#include "synthprior/gibbs.hpp"
#include "synthprior/model.hpp"

namespace synthprior {

namespace detail {

inline double mean_of(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double v : xs) ss += (v - m) * (v - m);
  return ss / static_cast<double>(xs.size() - 1);
}

// Variance of the window mean estimated from `batches` non-overlapping batch means.
inline double batch_means_variance_of_mean(std::span<const double> xs, std::size_t batches) {
  const std::size_t size = xs.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t k = 0; k < batches; ++k) means[k] = mean_of(xs.subspan(k * size, size));
  return sample_variance(means) / static_cast<double>(batches);
}

}  // namespace detail

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

/// Effective sample size N / (1 + 2 sum rho_k), truncated by Geyer's initial
/// monotone positive sequence and clamped to (0, 1.05 N].
inline double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 10) throw domain_error("ess: need at least 10 values");
  const double m = detail::mean_of(series);

  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += (series[t] - m) * (series[t + lag] - m);
    return acc / static_cast<double>(n);
  };

  const double gamma0 = autocov(0);
  if (!(gamma0 > 0.0)) throw domain_error("ess: series is constant, ESS undefined");

  // Gamma_k = gamma(2k) + gamma(2k + 1), kept while positive and forced non-increasing.
  double pair_sum = 0.0;
  double prev_pair = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    double pair = (k == 0 ? gamma0 : autocov(2 * k)) + autocov(2 * k + 1);
    if (pair <= 0.0) break;
    pair = std::min(pair, prev_pair);
    pair_sum += pair;
    prev_pair = pair;
  }
  const double tau = (2.0 * pair_sum - gamma0) / gamma0;
  const double cap = 1.05 * static_cast<double>(n);
  if (!(tau > 0.0)) return cap;
  return std::min(static_cast<double>(n) / tau, cap);
}

inline double ess(const Eigen::VectorXd& series) { return ess(as_span(series)); }

/// Geweke convergence z-score comparing the first 10% with the last 50% of the
/// chain. Window mean variances come from 20 batch means per window.
inline double geweke_z(std::span<const double> series) {
  constexpr std::size_t kBatches = 20;
  const std::size_t n = series.size();
  if (n < 100) throw domain_error("geweke_z: need at least 100 values");
  const std::size_t n_a = n / 10;
  const std::size_t n_b = n / 2;
  const auto head = series.first(n_a);
  const auto tail = series.last(n_b);

  const double diff = detail::mean_of(head) - detail::mean_of(tail);
  const double var = detail::batch_means_variance_of_mean(head, kBatches) +
                     detail::batch_means_variance_of_mean(tail, kBatches);
  if (var > 0.0) return diff / std::sqrt(var);
  if (diff == 0.0) return 0.0;
  throw numeric_error("geweke_z: zero within-window variance with differing means");
}

inline double geweke_z(const Eigen::VectorXd& series) { return geweke_z(as_span(series)); }

/// Quantile by linear interpolation between order statistics of sorted data:
/// h = (n - 1) q, result = x[floor h] + (h - floor h)(x[floor h + 1] - x[floor h]).
inline double sorted_quantile(std::span<const double> sorted, double q) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline double quantile(std::span<const double> series, double q) {
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, q);
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
};

/// Equal-tailed credible interval at `level`.
inline Interval credible_interval(std::span<const double> series, double level) {
  if (!(level > 0.0 && level < 1.0)) throw domain_error("credible_interval: level in (0, 1)");
  if (series.size() < 2) throw domain_error("credible_interval: need at least 2 values");
  std::vector<double> sorted(series.begin(), series.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - level) / 2.0;
  return {sorted_quantile(sorted, tail), sorted_quantile(sorted, 1.0 - tail)};
}

inline Interval credible_interval(const Eigen::VectorXd& series, double level) {
  return credible_interval(as_span(series), level);
}

/// Per-draw success probabilities sigma(x' beta).
inline Eigen::VectorXd probability_draws(const PosteriorDraws& draws, const Eigen::VectorXd& x) {
  if (x.size() != draws.dim()) throw domain_error("probability_draws: dimension mismatch");
  const Eigen::VectorXd eta = draws.draws * x;
  return eta.unaryExpr([](double t) { return sigmoid(t); });
}

/// Fraction of draws with sigma(x_dose' beta) - sigma(x_ref' beta) > delta.
inline double decision_prob(const PosteriorDraws& draws, const Eigen::VectorXd& x_dose,
                            const Eigen::VectorXd& x_ref, double delta) {
  if (x_dose.size() != draws.dim() || x_ref.size() != draws.dim()) {
    throw domain_error("decision_prob: dimension mismatch");
  }
  if (draws.kept() == 0) throw domain_error("decision_prob: no draws");
  const Eigen::VectorXd p_dose = probability_draws(draws, x_dose);
  const Eigen::VectorXd p_ref = probability_draws(draws, x_ref);
  const auto hits = ((p_dose - p_ref).array() > delta).count();
  return static_cast<double>(hits) / static_cast<double>(draws.kept());
}

struct Ed50Summary {
  double median = 0.0;
  double mean = 0.0;
  Interval interval;
  // The ratio of normals can lack moments; the mean is reported but not trusted.
  bool mean_unreliable = true;
};

inline Ed50Summary ed50_posterior(const PosteriorDraws& draws, double level = 0.95) {
  if (draws.dim() != 2) throw domain_error("ed50_posterior: needs (intercept, slope) draws");
  const Eigen::Index n = draws.kept();
  if (n < 2) throw domain_error("ed50_posterior: need at least 2 draws");
  const auto near_zero = (draws.draws.col(1).array().abs() < 1e-8).count();
  if (static_cast<double>(near_zero) >= 0.01 * static_cast<double>(n)) {
    throw numeric_error("ed50_posterior: too many near-zero slopes, ED50 unstable");
  }
  std::vector<double> ratio;
  ratio.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) {
    const double slope = draws.draws(t, 1);
    if (std::abs(slope) < 1e-8) continue;
    ratio.push_back(-draws.draws(t, 0) / slope);
  }
  Ed50Summary out;
  out.mean = detail::mean_of(ratio);
  out.median = quantile(ratio, 0.5);
  out.interval = credible_interval(ratio, level);
  return out;
}

struct CoefficientSummary {
  std::string label;
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
  double geweke_z = 0.0;
};

struct PointSummary {
  Eigen::VectorXd x;
  double mean = 0.0;
  Interval interval;
};

struct ChainSummary {
  std::vector<CoefficientSummary> coefficients;
  std::vector<PointSummary> points;
  double level = 0.95;
};

inline CoefficientSummary summarize_series(const std::string& label,
                                           const Eigen::VectorXd& series) {
  CoefficientSummary s;
  s.label = label;
  s.mean = series.mean();
  s.sd = series.size() > 1 ? std::sqrt(detail::sample_variance(as_span(series))) : 0.0;
  s.ess = ess(series);
  s.geweke_z = geweke_z(series);
  return s;
}

inline ChainSummary summarize(const PosteriorDraws& draws,
                              const std::vector<Eigen::VectorXd>& query_points,
                              double level = 0.95) {
  ChainSummary out;
  out.level = level;
  for (Eigen::Index k = 0; k < draws.dim(); ++k) {
    out.coefficients.push_back(
        summarize_series(draws.labels.at(static_cast<std::size_t>(k)), draws.column(k)));
  }
  for (const auto& x : query_points) {
    const Eigen::VectorXd probs = probability_draws(draws, x);
    out.points.push_back({x, probs.mean(), credible_interval(probs, level)});
  }
  return out;
}

}  // namespace synthprior
