#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "synthprior/diagnostics.hpp"

namespace {

using namespace synthprior;

std::vector<double> iid_normals(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = rng.normal();
  return out;
}

std::vector<double> ar1(std::size_t n, double rho, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> out(n);
  double x = rng.normal() / std::sqrt(1 - rho * rho);
  for (auto& v : out) {
    x = rho * x + rng.normal();
    v = x;
  }
  return out;
}

PosteriorDraws make_draws(const Eigen::MatrixXd& m) {
  PosteriorDraws d;
  d.draws = m;
  d.labels = default_labels(m.cols());
  return d;
}

TEST(Ess, IidNearN) {
  const auto xs = iid_normals(10'000, 1);
  const double e = ess(xs);
  EXPECT_GE(e, 0.85 * 10'000);
  EXPECT_LE(e, 1.05 * 10'000);
}

TEST(Ess, Ar1MatchesClosedForm) {
  const auto xs = ar1(100'000, 0.5, 2);
  // ESS / N -> (1 - rho) / (1 + rho) = 1/3.
  EXPECT_NEAR(ess(xs) / 100'000.0, 1.0 / 3.0, 0.05);
}

TEST(Ess, AlternatingSeriesHitsClamp) {
  std::vector<double> xs(1000);
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = i % 2 ? -1.0 : 1.0;
  EXPECT_DOUBLE_EQ(ess(xs), 1.05 * 1000);
}

TEST(Ess, ErrorsOnConstantOrShort) {
  EXPECT_THROW(ess(std::vector<double>(100, 3.0)), Error);
  EXPECT_THROW(ess(std::vector<double>(5, 1.0)), Error);
}

TEST(Ess, AffineInvariant) {
  const auto xs = ar1(5000, 0.8, 3);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = -3.5 * xs[i] + 42.0;
  EXPECT_NEAR(ess(xs), ess(ys), 1e-6 * ess(xs));
}

TEST(Geweke, IidMostlyWithinThree) {
  int within = 0;
  for (int trial = 0; trial < 500; ++trial) {
    within += std::abs(geweke_z(iid_normals(10'000, 100 + trial))) < 3.0;
  }
  EXPECT_GE(within, 495);
}

TEST(Geweke, DetectsMeanShift) {
  auto xs = iid_normals(10'000, 7);
  for (std::size_t i = xs.size() / 2; i < xs.size(); ++i) xs[i] += 5.0;
  EXPECT_GT(std::abs(geweke_z(xs)), 5.0);
}

TEST(Geweke, TinyNoiseStaysFinite) {
  auto xs = iid_normals(1000, 8);
  for (auto& v : xs) v = 1.0 + 1e-12 * v;
  EXPECT_TRUE(std::isfinite(geweke_z(xs)));
  EXPECT_EQ(geweke_z(std::vector<double>(200, 2.0)), 0.0);
}

TEST(Geweke, ShiftInvariantAndOddUnderNegation) {
  const auto xs = ar1(4000, 0.3, 9);
  std::vector<double> shifted(xs), negated(xs);
  for (auto& v : shifted) v += 10.0;
  for (auto& v : negated) v = -v;
  const double z = geweke_z(xs);
  EXPECT_NEAR(geweke_z(shifted), z, 1e-8);
  EXPECT_NEAR(geweke_z(negated), -z, 1e-12);
}

TEST(Geweke, TooShort) { EXPECT_THROW(geweke_z(std::vector<double>(99, 1.0)), Error); }

TEST(CredibleInterval, UniformQuantiles) {
  RandomStream rng(10, 0);
  std::vector<double> xs(100'000);
  for (auto& v : xs) v = rng.uniform();
  const auto ci = credible_interval(xs, 0.95);
  EXPECT_NEAR(ci.lo, 0.025, 0.005);
  EXPECT_NEAR(ci.hi, 0.975, 0.005);
}

TEST(CredibleInterval, InterpolationRule) {
  std::vector<double> xs(100);
  for (int i = 0; i < 100; ++i) xs[static_cast<std::size_t>(99 - i)] = i + 1;  // unsorted input
  const auto ci = credible_interval(xs, 0.5);
  // h = 99 * 0.25 = 24.75 -> 25 + 0.75; h = 74.25 -> 75 + 0.25
  EXPECT_DOUBLE_EQ(ci.lo, 25.75);
  EXPECT_DOUBLE_EQ(ci.hi, 75.25);
}

TEST(CredibleInterval, ConstantSeriesAndErrors) {
  const auto ci = credible_interval(std::vector<double>(10, 0.3), 0.9);
  EXPECT_EQ(ci.lo, 0.3);
  EXPECT_EQ(ci.hi, 0.3);
  EXPECT_THROW(credible_interval(std::vector<double>{1.0}, 0.9), Error);
  EXPECT_THROW(credible_interval(std::vector<double>{1.0, 2.0}, 1.0), Error);
}

TEST(CredibleInterval, WidthNonDecreasingInLevel) {
  const auto xs = ar1(3000, 0.5, 11);
  double prev = 0.0;
  for (double level = 0.05; level < 0.999; level += 0.05) {
    const double w = credible_interval(xs, level).width();
    EXPECT_GE(w, prev);
    prev = w;
  }
}

TEST(DecisionProb, IdenticalPointsGiveZero) {
  RandomStream rng(12, 0);
  Eigen::MatrixXd m(500, 2);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  const auto d = make_draws(m);
  EXPECT_EQ(decision_prob(d, Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2), 1e-9), 0.0);
}

TEST(DecisionProb, SteepSlopesGiveOne) {
  Eigen::MatrixXd m(200, 2);
  for (Eigen::Index i = 0; i < 200; ++i) m.row(i) << -3.0, 5.0 + 0.01 * i;
  EXPECT_EQ(decision_prob(make_draws(m), Eigen::Vector2d(1, 4), Eigen::Vector2d(1, 0), 0.05), 1.0);
}

TEST(DecisionProb, MonotoneInDelta) {
  RandomStream rng(13, 0);
  Eigen::MatrixXd m(2000, 2);
  for (Eigen::Index i = 0; i < 2000; ++i) m.row(i) << -2 + 0.3 * rng.normal(), 0.3 + 0.2 * rng.normal();
  const auto d = make_draws(m);
  double prev = 1.0;
  for (double delta = -0.2; delta <= 0.5; delta += 0.01) {
    const double p = decision_prob(d, Eigen::Vector2d(1, 2.5), Eigen::Vector2d(1, 0), delta);
    EXPECT_LE(p, prev);
    EXPECT_GE(p, 0.0);
    prev = p;
  }
}

TEST(Ed50, ConstantAndRatioInvariant) {
  Eigen::MatrixXd m(50, 2);
  m.col(0).setConstant(-2.0);
  m.col(1).setConstant(1.0);
  const auto e = ed50_posterior(make_draws(m));
  EXPECT_DOUBLE_EQ(e.median, 2.0);
  EXPECT_DOUBLE_EQ(e.interval.lo, 2.0);
  EXPECT_DOUBLE_EQ(e.interval.hi, 2.0);

  RandomStream rng(14, 0);
  for (Eigen::Index i = 0; i < 50; ++i) {
    const double slope = 0.5 + rng.uniform();
    m.row(i) << -1.7 * slope, slope;
  }
  const auto r = ed50_posterior(make_draws(m));
  EXPECT_NEAR(r.median, 1.7, 1e-12);
  EXPECT_NEAR(r.interval.lo, 1.7, 1e-12);
  EXPECT_NEAR(r.interval.hi, 1.7, 1e-12);
}

TEST(Ed50, JointSignFlipInvariant) {
  RandomStream rng(15, 0);
  Eigen::MatrixXd m(300, 2);
  for (Eigen::Index i = 0; i < 300; ++i) m.row(i) << rng.normal() - 2, 1 + 0.2 * rng.normal();
  const auto a = ed50_posterior(make_draws(m));
  const auto b = ed50_posterior(make_draws(-m));
  EXPECT_EQ(a.median, b.median);
  EXPECT_EQ(a.interval.lo, b.interval.lo);
  EXPECT_EQ(a.interval.hi, b.interval.hi);
}

TEST(Ed50, UnstableWhenSlopesVanish) {
  Eigen::MatrixXd m(100, 2);
  m.col(0).setConstant(-1);
  m.col(1).setConstant(1);
  m(3, 1) = 0.0;  // 1% of draws
  EXPECT_THROW(ed50_posterior(make_draws(m)), Error);
  EXPECT_THROW(ed50_posterior(make_draws(Eigen::MatrixXd::Ones(10, 3))), Error);
}

TEST(Summarize, ProbabilityIntervalsInUnitRange) {
  RandomStream rng(16, 0);
  Eigen::MatrixXd m(1000, 2);
  for (Eigen::Index i = 0; i < 1000; ++i) m.row(i) << -1 + 0.5 * rng.normal(), 0.2 * rng.normal();
  const auto s = summarize(make_draws(m), {Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 3)});
  ASSERT_EQ(s.coefficients.size(), 2u);
  ASSERT_EQ(s.points.size(), 2u);
  for (const auto& c : s.coefficients) {
    EXPECT_GT(c.ess, 0.0);
    EXPECT_LE(c.ess, 1.05 * 1000);
  }
  for (const auto& p : s.points) {
    EXPECT_LE(p.interval.lo, p.interval.hi);
    EXPECT_GE(p.interval.lo, 0.0);
    EXPECT_LE(p.interval.hi, 1.0);
  }
}

}  // namespace
