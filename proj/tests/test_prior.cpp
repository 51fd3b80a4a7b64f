#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "synthprior/prior.hpp"

namespace {

using namespace synthprior;

Eigen::VectorXd v2(double a, double b) { return Eigen::Vector2d(a, b); }

BcjPrior dose_prior() {
  return BcjPrior({elicit_from_mean_and_weight(0.10, 10, v2(1, 0)),
                   elicit_from_mean_and_weight(0.30, 10, v2(1, 4))});
}

TEST(Elicit, TablePriors) {
  const auto top = elicit_from_mean_and_weight(0.30, 10, v2(1, 4));
  EXPECT_NEAR(top.a, 3.0, 1e-12);
  EXPECT_NEAR(top.b, 7.0, 1e-12);
  const auto placebo = elicit_from_mean_and_weight(0.10, 10, v2(1, 0));
  EXPECT_NEAR(placebo.a, 1.0, 1e-12);
  EXPECT_NEAR(placebo.b, 9.0, 1e-12);
  const auto flat = elicit_from_mean_and_weight(0.5, 2, v2(1, 7));
  EXPECT_DOUBLE_EQ(flat.a, 1.0);
  EXPECT_DOUBLE_EQ(flat.b, 1.0);
}

TEST(Elicit, RejectsDegenerateMeanAndWeight) {
  EXPECT_THROW(elicit_from_mean_and_weight(0.0, 10, v2(1, 0)), Error);
  EXPECT_THROW(elicit_from_mean_and_weight(1.0, 10, v2(1, 0)), Error);
  EXPECT_THROW(elicit_from_mean_and_weight(0.4, 0.0, v2(1, 0)), Error);
  EXPECT_THROW(elicit_from_mean_and_weight(0.4, -1.0, v2(1, 0)), Error);
}

TEST(Elicit, RoundTripProperty) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> mean(1e-6, 1.0 - 1e-6), weight(0.01, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double m = mean(gen), w = weight(gen);
    const auto pt = elicit_from_mean_and_weight(m, w, v2(1, 0));
    EXPECT_NEAR(pt.a / (pt.a + pt.b), m, 1e-12);
    EXPECT_NEAR((pt.a + pt.b) / w, 1.0, 1e-12);
  }
}

TEST(BcjPriorType, RejectsInvalidPoints) {
  EXPECT_THROW(BcjPrior(std::vector<DesignPoint>{}), Error);
  EXPECT_THROW(BcjPrior({DesignPoint{v2(1, 0), 1, 1}, DesignPoint{Eigen::Vector3d(1, 0, 0), 1, 1}}),
               Error);
  EXPECT_THROW(BcjPrior({DesignPoint{v2(1, 0), 0.0, 1}}), Error);
  EXPECT_THROW(BcjPrior({DesignPoint{v2(1, NAN), 1, 1}}), Error);
}

TEST(ToSynthetic, DosePrior) {
  const auto rows = to_synthetic(dose_prior());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].x, v2(1, 0));
  EXPECT_NEAR(rows[0].trials, 10, 1e-12);
  EXPECT_NEAR(rows[0].successes, 1, 1e-12);
  EXPECT_EQ(rows[1].x, v2(1, 4));
  EXPECT_NEAR(rows[1].trials, 10, 1e-12);
  EXPECT_NEAR(rows[1].successes, 3, 1e-12);
}

TEST(ToSynthetic, OringPrior) {
  const BcjPrior prior({DesignPoint{v2(1, 31), 8, 2}, DesignPoint{v2(1, 81), 1, 9}});
  const auto rows = to_synthetic(prior);
  EXPECT_EQ(rows[0].x, v2(1, 31));
  EXPECT_EQ(rows[0].trials, 10);
  EXPECT_EQ(rows[0].successes, 8);
  EXPECT_EQ(rows[1].x, v2(1, 81));
  EXPECT_EQ(rows[1].trials, 10);
  EXPECT_EQ(rows[1].successes, 1);
}

TEST(ToSynthetic, SingleUniformPointAndPseudoCount) {
  const auto rows = to_synthetic(BcjPrior({DesignPoint{v2(1, 2), 1, 1}}));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].trials, 2);
  EXPECT_EQ(rows[0].successes, 1);

  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.1, 20);
  std::vector<DesignPoint> pts;
  double total = 0;
  for (int j = 0; j < 7; ++j) {
    pts.push_back({v2(1, j), u(gen), u(gen)});
    total += pts.back().a + pts.back().b;
  }
  double synth_total = 0;
  for (const auto& r : to_synthetic(BcjPrior(pts))) synth_total += r.trials;
  EXPECT_NEAR(synth_total, total, 1e-12 * total);
}

TEST(ValidatePrior, Examples) {
  const auto full = validate_prior(dose_prior());
  EXPECT_EQ(full.rank, 2);
  EXPECT_TRUE(full.proper);
  EXPECT_FALSE(full.over_determined);
  EXPECT_FALSE(full.under_determined);

  const auto single = validate_prior(BcjPrior({DesignPoint{v2(1, 0), 1, 9}}));
  EXPECT_EQ(single.rank, 1);
  EXPECT_FALSE(single.proper);
  EXPECT_TRUE(single.under_determined);
  EXPECT_FALSE(single.messages.empty());

  const auto three = validate_prior(BcjPrior(
      {DesignPoint{v2(1, 0), 1, 9}, DesignPoint{v2(1, 2), 2, 8}, DesignPoint{v2(1, 4), 3, 7}}));
  EXPECT_EQ(three.rank, 2);
  EXPECT_TRUE(three.over_determined);
  EXPECT_TRUE(three.proper);
}

TEST(ValidatePrior, SmallWeightsAreImproper) {
  const auto rep =
      validate_prior(BcjPrior({DesignPoint{v2(1, 0), 0.2, 0.3}, DesignPoint{v2(1, 4), 3, 7}}));
  EXPECT_EQ(rep.rank, 2);
  EXPECT_FALSE(rep.weights_at_least_one);
  EXPECT_FALSE(rep.proper);
}

TEST(ValidatePrior, RankAgreesWithSvdOnRandomInstances) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 200; ++trial) {
    const int r = static_cast<int>(gen() % 6);  // target rank 0..5
    Eigen::MatrixXd left(5, std::max(r, 1)), right(std::max(r, 1), 5);
    for (int i = 0; i < left.size(); ++i) left.data()[i] = normal(gen);
    for (int i = 0; i < right.size(); ++i) right.data()[i] = normal(gen);
    Eigen::MatrixXd m = r == 0 ? Eigen::MatrixXd::Zero(5, 5) : Eigen::MatrixXd(left * right);
    if (r == 0) m(0, 0) = 1.0;  // points must be valid; rank 1 then

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    int svd_rank = 0;
    for (int k = 0; k < sv.size(); ++k) svd_rank += sv[k] > 1e-9 * sv[0];

    std::vector<DesignPoint> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({m.row(i).transpose(), 1, 1});
    EXPECT_EQ(validate_prior(BcjPrior(pts)).rank, svd_rank);
  }
}

TEST(BetaBinomial, Examples) {
  const auto p1 = beta_binomial_posterior(1, 9, 3, 10);
  EXPECT_DOUBLE_EQ(p1.a, 4);
  EXPECT_DOUBLE_EQ(p1.b, 16);
  EXPECT_DOUBLE_EQ(p1.mean, 0.20);

  const auto p2 = beta_binomial_posterior(2.5, 4.5, 0, 0);
  EXPECT_DOUBLE_EQ(p2.a, 2.5);
  EXPECT_DOUBLE_EQ(p2.b, 4.5);

  const auto p3 = beta_binomial_posterior(8, 2, 0, 10);
  EXPECT_DOUBLE_EQ(p3.a, 8);
  EXPECT_DOUBLE_EQ(p3.b, 12);
  EXPECT_DOUBLE_EQ(p3.mean, 0.40);
}

TEST(BetaBinomial, RejectsBadCounts) {
  EXPECT_THROW(beta_binomial_posterior(1, 1, 5, 4), Error);
  EXPECT_THROW(beta_binomial_posterior(1, 1, -1, 4), Error);
  EXPECT_THROW(beta_binomial_posterior(0, 1, 1, 4), Error);
}

TEST(BetaBinomial, PrecisionWeightedAverageProperty) {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> hyper(0.1, 30);
  for (int i = 0; i < 2000; ++i) {
    const double a = hyper(gen), b = hyper(gen);
    const long n = 1 + static_cast<long>(gen() % 200);
    const long s = static_cast<long>(gen() % static_cast<unsigned long>(n + 1));
    const auto post = beta_binomial_posterior(a, b, s, n);
    const double kappa = a + b, prior_mean = a / kappa, mle = double(s) / double(n);
    const double weighted = kappa / (kappa + n) * prior_mean + n / (kappa + n) * mle;
    EXPECT_NEAR(post.mean, weighted, 1e-12);
    if (prior_mean != mle) {
      EXPECT_GT(post.mean, std::min(prior_mean, mle));
      EXPECT_LT(post.mean, std::max(prior_mean, mle));
    }
  }
}

}  // namespace
