#pragma once

// Polya-Gamma PG(b, z) sampling.
//
// PG(1, z) uses Devroye's alternating-series accept/reject on a two-piece
// proposal: a truncated inverse-Gaussian below the truncation point 0.64 and
// a truncated exponential above it. The draw is exact and the expected number
// of proposals is below 1.001 for every z.
//
// Integer b is a sum of b independent PG(1, z) draws. A fractional remainder
// uses the weighted gamma-sum representation
//
//   PG(f, z) = 1 / (2 pi^2) * sum_k g_k / ((k - 1/2)^2 + z^2 / (4 pi^2)),
//   g_k ~ Gamma(f, 1),
//
// truncated after 200 terms, with the omitted terms replaced by their mean.
// That path is approximate; callers can test it with pg_is_exact().

#include <cmath>
#include <numbers>

#include "synthprior/error.hpp"
#include "synthprior/random.hpp"

namespace synthprior {

struct PgParams {
  double b = 1.0;
  double z = 0.0;
};

/// E[PG(b, z)] = b / (2z) * tanh(z / 2), with limit b / 4 at z = 0.
inline double pg_mean(double b, double z) {
  if (std::abs(z) < 1e-8) return b / 4.0 - b * z * z / 48.0;
  return b / (2.0 * z) * std::tanh(z / 2.0);
}

inline double pg_mean(const PgParams& params) { return pg_mean(params.b, params.z); }

/// Var[PG(b, z)] = b / (4 z^3) * (sinh z - z) / cosh^2(z / 2), limit b / 24.
inline double pg_variance(double b, double z) {
  const double az = std::abs(z);
  if (az < 1e-4) return b / 24.0 - b * z * z / 240.0;
  const double c = std::cosh(z / 2.0);
  return b / (4.0 * az * az * az) * (std::sinh(az) - az) / (c * c);
}

/// True when sample_pg(b, .) is an exact draw, i.e. b is an integer.
inline bool pg_is_exact(double b) { return std::floor(b) == b; }

namespace detail {

inline constexpr double kPgTrunc = 0.64;
inline constexpr double kPi = std::numbers::pi;

inline double log_std_normal_cdf(double x) {
  return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
}

// n-th coefficient of the alternating series for the Jacobi density J*(1, 0).
inline double pg_series_coef(int n, double x) {
  const double k = n + 0.5;
  if (x > kPgTrunc) return kPi * k * std::exp(-k * k * kPi * kPi * x / 2.0);
  const double r = 2.0 / (kPi * x);
  return r * std::sqrt(r) * kPi * k * std::exp(-2.0 * k * k / x);
}

// Probability that the proposal takes the exponential (right) piece.
inline double pg_right_mass(double h, double fz) {
  const double inv_sqrt_t = std::sqrt(1.0 / kPgTrunc);
  const double b = inv_sqrt_t * (kPgTrunc * h - 1.0);
  const double a = -inv_sqrt_t * (kPgTrunc * h + 1.0);
  const double x0 = std::log(fz) + fz * kPgTrunc;
  const double xb = x0 - h + log_std_normal_cdf(b);
  const double xa = x0 + h + log_std_normal_cdf(a);
  const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse-Gaussian IG(1/h, 1) truncated to (0, kPgTrunc).
inline double truncated_inverse_gaussian(double h, RandomStream& rng) {
  const double mu = 1.0 / h;
  double x = kPgTrunc + 1.0;
  if (mu > kPgTrunc) {
    // Chi-square(1) proposal truncated below kPgTrunc, then accept on exp(-h^2 x / 2).
    double accept = 0.0;
    while (rng.uniform() > accept) {
      double e1, e2;
      do {
        e1 = rng.exponential();
        e2 = rng.exponential();
      } while (e1 * e1 > 2.0 * e2 / kPgTrunc);
      x = 1.0 + e1 * kPgTrunc;
      x = kPgTrunc / (x * x);
      accept = std::exp(-0.5 * h * h * x);
    }
  } else {
    while (x > kPgTrunc) {
      const double y = rng.normal();
      const double yy = y * y;
      const double half_mu = 0.5 * mu;
      x = mu + half_mu * mu * yy - half_mu * std::sqrt(4.0 * mu * yy + (mu * yy) * (mu * yy));
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace detail

/// One exact draw from PG(1, z).
inline double sample_pg1(double z, RandomStream& rng) {
  using namespace detail;
  // Work with J*(1, h), h = |z| / 2; PG(1, z) = J*(1, |z| / 2) / 4.
  const double h = std::abs(z) * 0.5;
  const double fz = kPi * kPi / 8.0 + h * h / 2.0;
  const double right_mass = pg_right_mass(h, fz);

  for (;;) {
    double x;
    if (rng.uniform() < right_mass) {
      x = kPgTrunc + rng.exponential() / fz;
    } else {
      x = truncated_inverse_gaussian(h, rng);
    }

    double s = pg_series_coef(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= pg_series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += pg_series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

inline constexpr int kPgSeriesTerms = 200;

/// Approximate PG(f, z) for 0 < f < 1 via the truncated gamma sum.
inline double sample_pg_series(double f, double z, RandomStream& rng) {
  using detail::kPi;
  const double c = z / (2.0 * kPi);
  const double c2 = c * c;
  double sum = 0.0;
  double partial = 0.0;
  for (int k = 1; k <= kPgSeriesTerms; ++k) {
    const double d = (k - 0.5) * (k - 0.5) + c2;
    sum += rng.gamma(f) / d;
    partial += 1.0 / d;
  }
  // sum_{k >= 1} 1 / ((k - 1/2)^2 + c^2) = pi tanh(pi c) / (2c), pi^2 / 2 at c = 0.
  const double total = std::abs(c) < 1e-8 ? kPi * kPi / 2.0
                                          : kPi * std::tanh(kPi * c) / (2.0 * c);
  const double tail = std::max(total - partial, 0.0);
  return (sum + f * tail) / (2.0 * kPi * kPi);
}

/// A draw from PG(b, z) for b >= 1. Exact for integer b.
inline double sample_pg(double b, double z, RandomStream& rng) {
  if (!(b >= 1.0)) throw domain_error("sample_pg: shape b must be >= 1");
  if (!std::isfinite(z)) throw domain_error("sample_pg: tilt z must be finite");
  const double whole = std::floor(b);
  const double frac = b - whole;
  double omega = 0.0;
  for (double i = 0.0; i < whole; i += 1.0) omega += sample_pg1(z, rng);
  if (frac > 0.0) omega += sample_pg_series(frac, z, rng);
  return omega;
}

inline double sample_pg(const PgParams& params, RandomStream& rng) {
  return sample_pg(params.b, params.z, rng);
}

}  // namespace synthprior
