#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "synthprior/polya_gamma.hpp"
#include "test_support.hpp"

namespace {

using synthprior::RandomStream;
using synthprior::testing::ks_critical_01;
using synthprior::testing::ks_statistic;
using synthprior::testing::moments;

// Oracle for E[PG(b, z)]. The PG identity gives the Laplace transform of
// PG(b, 0) at s = psi^2 / 2 as 2^b e^{-kappa psi} (e^psi)^a / (1 + e^psi)^b,
// and E[PG(b, z)] = -d/ds log LT(s) at s = z^2 / 2. Differentiate numerically.
double log_laplace_transform(double b, double s) {
  const double a = 0.3 * b;  // any a works; kappa cancels it
  const double psi = std::sqrt(2.0 * s);
  const double kappa = a - b / 2.0;
  const double log_lhs = a * psi - b * std::log1p(std::exp(psi));
  return log_lhs + b * std::log(2.0) - kappa * psi;
}

double pg_mean_oracle(double b, double z) {
  const double s0 = z * z / 2.0;
  const double h = 1e-5;
  if (s0 < 2.0 * h) {
    // second-order forward difference at the boundary s = 0
    const double f0 = log_laplace_transform(b, s0);
    const double f1 = log_laplace_transform(b, s0 + h);
    const double f2 = log_laplace_transform(b, s0 + 2.0 * h);
    return -(-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h);
  }
  return -(log_laplace_transform(b, s0 + h) - log_laplace_transform(b, s0 - h)) / (2.0 * h);
}

std::vector<double> draws(double b, double z, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = synthprior::sample_pg(b, z, rng);
  return out;
}

std::vector<double> draws_pg1(double z, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = synthprior::sample_pg1(z, rng);
  return out;
}

TEST(PgMean, MatchesFiniteDifferenceOracle) {
  for (double b : {1.0, 2.0, 10.0, 3.7}) {
    for (double z : {0.0, 0.5, 2.0, 5.0, -3.0}) {
      EXPECT_NEAR(synthprior::pg_mean(b, z), pg_mean_oracle(b, z), 1e-6 * b) << b << " " << z;
    }
  }
}

TEST(PgMean, Examples) {
  EXPECT_DOUBLE_EQ(synthprior::pg_mean(1.0, 0.0), 0.25);
  EXPECT_NEAR(synthprior::pg_mean(10.0, 2.0), 10.0 * std::tanh(1.0) / 4.0, 1e-14);
  EXPECT_NEAR(synthprior::pg_mean(10.0, 2.0), 1.903985, 1e-6);
  EXPECT_EQ(synthprior::pg_mean(2.0, -2.0), synthprior::pg_mean(2.0, 2.0));
}

TEST(PgMean, SmallZSeriesIsContinuous) {
  const double below = synthprior::pg_mean(3.0, 0.99e-8);
  const double above = synthprior::pg_mean(3.0, 1.01e-8);
  EXPECT_NEAR(below, 0.75, 1e-15);
  EXPECT_NEAR(above, 0.75, 1e-15);
}

TEST(SamplePg1, MeanAtZeroAndTwo) {
  // 10^6 draws, 4 standard errors.
  for (double z : {0.0, 2.0}) {
    const auto m = moments(draws_pg1(z, 1'000'000, 11));
    const double expected = z == 0.0 ? 0.25 : std::tanh(1.0) / 4.0;
    EXPECT_NEAR(expected, pg_mean_oracle(1.0, z), 1e-6);
    EXPECT_LT(std::abs(m.mean - expected), 4.0 * m.se) << "z=" << z;
  }
}

TEST(SamplePg1, VarianceMatchesAnalytic) {
  for (double z : {0.0, 1.0, 4.0}) {
    const auto m = moments(draws_pg1(z, 200'000, 12));
    EXPECT_LT(std::abs(m.var - synthprior::pg_variance(1.0, z)), 4.0 * m.var_se) << "z=" << z;
  }
}

TEST(SamplePg1, SignSymmetryKs) {
  const auto pos = draws_pg1(3.0, 100'000, 21);
  const auto neg = draws_pg1(-3.0, 100'000, 22);
  EXPECT_LT(ks_statistic(pos, neg), ks_critical_01(pos.size(), neg.size()));
}

TEST(SamplePg1, PositiveAndFiniteIncludingLargeTilt) {
  RandomStream rng(5, 0);
  for (double z : {0.0, 1e-9, 0.64, 3.0, 40.0, 700.0, -700.0}) {
    for (int i = 0; i < 2000; ++i) {
      const double w = synthprior::sample_pg1(z, rng);
      ASSERT_GT(w, 0.0);
      ASSERT_TRUE(std::isfinite(w));
    }
  }
}

TEST(SamplePg, IntegerShapeMeans) {
  for (double z : {0.0, 2.0}) {
    const auto m = moments(draws(10.0, z, 1'000'000, 31));
    const double expected = z == 0.0 ? 2.5 : 10.0 * std::tanh(1.0) / 4.0;
    EXPECT_LT(std::abs(m.mean - expected), 4.0 * m.se) << "z=" << z;
  }
}

TEST(SamplePg, UnitShapeIsPg1Bitwise) {
  RandomStream a(77, 3), b(77, 3);
  for (int i = 0; i < 1000; ++i) {
    const double z = -4.0 + 0.008 * i;
    ASSERT_EQ(synthprior::sample_pg(1.0, z, a), synthprior::sample_pg1(z, b));
  }
}

TEST(SamplePg, AdditivityOfTwoUnitDraws) {
  const std::size_t n = 200'000;
  for (double z : {0.0, 1.5}) {
    const auto two = moments(draws(2.0, z, n, 41));
    RandomStream rng(42, 0);
    std::vector<double> sums(n);
    for (auto& s : sums) s = synthprior::sample_pg1(z, rng) + synthprior::sample_pg1(z, rng);
    const auto ref = moments(sums);
    EXPECT_LT(std::abs(two.mean - ref.mean), 4.0 * std::hypot(two.se, ref.se));
    EXPECT_LT(std::abs(two.var - ref.var), 4.0 * std::hypot(two.var_se, ref.var_se));
  }
}

TEST(SamplePg, RejectsShapeBelowOne) {
  RandomStream rng(1, 0);
  EXPECT_THROW(synthprior::sample_pg(0.5, 0.0, rng), synthprior::Error);
  EXPECT_THROW(synthprior::sample_pg(0.0, 0.0, rng), synthprior::Error);
  EXPECT_THROW(synthprior::sample_pg(2.0, NAN, rng), synthprior::Error);
}

TEST(SamplePg, FractionalShapeIsApproximateButMomentMatched) {
  EXPECT_FALSE(synthprior::pg_is_exact(2.5));
  EXPECT_TRUE(synthprior::pg_is_exact(10.0));
  for (double z : {0.0, 1.0, 6.0}) {
    const auto m = moments(draws(2.5, z, 100'000, 51));
    EXPECT_LT(std::abs(m.mean - synthprior::pg_mean(2.5, z)), 4.0 * m.se) << "z=" << z;
  }
}

TEST(SamplePg, DeterministicForSameSeed) {
  EXPECT_EQ(draws(3.0, 0.7, 1000, 9), draws(3.0, 0.7, 1000, 9));
  EXPECT_NE(draws(3.0, 0.7, 1000, 9), draws(3.0, 0.7, 1000, 10));
}

TEST(RandomStream, StreamsAreDistinct) {
  RandomStream a(1, 0), b(1, 1), c(2, 0);
  const auto x = a(), y = b(), w = c();
  EXPECT_NE(x, y);
  EXPECT_NE(x, w);
}

}  // namespace
