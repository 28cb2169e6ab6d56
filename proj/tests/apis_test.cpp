#include "pelab/apis.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "pelab/hyperparams.hpp"

namespace pelab {
namespace {

Point p2(double x, double y) { return Eigen::Vector2d(x, y); }

TEST(RandomApi, PointMassAndCopy) {
  Rng rng(1);
  const Domain ball = Domain::unit_ball(2);
  const Dataset three = random_api(ball, 3, PointMass{p2(0, 0)}, rng);
  EXPECT_EQ(three, Dataset::Zero(2, 3));

  Dataset S(2, 4);
  S << 0.1, 0.2, -0.3, 0.0, 0.5, 0.1, 0.2, -0.9;
  EXPECT_EQ(random_api(ball, 10, CopyOf{S}, rng), S);

  const Dataset half = random_api(ball, 10, Interpolate{0.25, S}, rng);
  EXPECT_TRUE(half.isApprox(0.5 * S));
  EXPECT_EQ(random_api(ball, 10, Interpolate{0.5, S}, rng), Dataset::Zero(2, 4));
}

TEST(RandomApi, RejectsOutsidePoints) {
  Rng rng(1);
  const Domain ball = Domain::unit_ball(2);
  EXPECT_THROW(random_api(ball, 3, PointMass{p2(2, 0)}, rng), std::invalid_argument);
  Dataset far(2, 1);
  far << 3, 3;
  EXPECT_THROW(random_api(ball, 3, CopyOf{far}, rng), std::invalid_argument);
  EXPECT_THROW(random_api(ball, 0, UniformBall{}, rng), std::invalid_argument);
}

TEST(RandomApi, UniformBallMoments) {
  Rng rng(2);
  const Domain ball = Domain::unit_ball(2);
  const Dataset X = random_api(ball, 100000, UniformBall{}, rng);
  EXPECT_TRUE(contains_all(ball, X));
  // E|U| = d/(d+1) for U uniform in the unit d-ball.
  EXPECT_NEAR(X.colwise().norm().mean(), 2.0 / 3.0, 0.01);
  EXPECT_NEAR(X.rowwise().mean().norm(), 0.0, 0.01);
}

TEST(RandomApi, UniformBoxWithinBallDomain) {
  Rng rng(3);
  const Domain ball = Domain::unit_ball(3);
  const Dataset X = random_api(ball, 2000, UniformBox{}, rng);
  EXPECT_TRUE(contains_all(ball, X));
  const Domain box = Domain::unit_box(2);
  const Dataset Y = random_api(box, 2000, UniformBox{}, rng);
  EXPECT_TRUE(contains_all(box, Y));
  EXPECT_NEAR(Y.rowwise().mean()[0], 0.5, 0.03);
  EXPECT_THROW(random_api(box, 5, UniformBall{}, rng), std::invalid_argument);
}

TEST(GaussianVariation, LevelsAndScales) {
  const GaussianVariationApi api(Domain::unit_ball(2), 0.1);
  EXPECT_EQ(api.levels(), 5);
  EXPECT_EQ(api.contract().v, 11);
  EXPECT_NEAR(api.level_sigmas()[0], 0.010989029672194643, 1e-17);
  for (int l = 1; l < api.levels(); ++l) {
    EXPECT_DOUBLE_EQ(api.level_sigmas()[l], 2 * api.level_sigmas()[l - 1]);
  }
  EXPECT_NEAR(api.contract().gamma, gamma_of_d(2), 0);
}

TEST(GaussianVariation, StructuralContract) {
  Rng rng(4);
  const Domain ball = Domain::unit_ball(2);
  const GaussianVariationApi api(ball, 0.05);
  for (int trial = 0; trial < 500; ++trial) {
    const Point z = random_api(ball, 1, UniformBall{}, rng).col(0);
    const Dataset V = api.vary(z, rng);
    EXPECT_EQ(V.col(0), z);
    EXPECT_EQ(V.cols(), 2 * api.levels() + 1);
    EXPECT_LE(V.cols(), api.contract().v);
    EXPECT_TRUE(contains_all(ball, V));
  }
  EXPECT_THROW(api.vary(p2(1.5, 0), rng), std::invalid_argument);
}

TEST(GaussianVariation, DatasetConcatenationAndDeterminism) {
  const Domain ball = Domain::unit_ball(2);
  const GaussianVariationApi api(ball, 0.1);
  Rng seed_rng(5);
  const Dataset S = random_api(ball, 7, UniformBall{}, seed_rng);
  Rng a(42), b(42), c(42);
  const Dataset V = api.vary_dataset(S, a);
  EXPECT_EQ(V.cols(), 77);
  EXPECT_EQ(V, api.vary_dataset(S, b));
  for (Eigen::Index i = 0; i < 7; ++i) {
    EXPECT_EQ(V.middleCols(11 * i, 11), api.vary(S.col(i), c));
  }
}

TEST(GaussianVariation, ContractionHoldsOnSomePairs) {
  Rng rng(6);
  const Domain ball = Domain::unit_ball(2);
  const double alpha = 0.05;
  const GaussianVariationApi api(ball, alpha);
  const auto c = api.contract();
  for (double r : {0.15, 0.4, 0.8, 1.5}) {
    const Point z1 = p2(-r / 2, 0.1), z2 = p2(r / 2, 0.1);
    const ContractionEstimate est = contraction_estimate(api, z1, z2, 4000, rng);
    EXPECT_LE(est.mean, contraction_bound(c, z1, z2) + 3 * est.std_error) << "r=" << r;
    EXPECT_LE(est.mean, distance(z1, z2));
  }
}

TEST(GaussianVariation, ContractionZeroAtSamePoint) {
  Rng rng(7);
  const GaussianVariationApi api(Domain::unit_ball(2), 0.05);
  const ContractionEstimate est = contraction_estimate(api, p2(0.3, 0.3), p2(0.3, 0.3), 200, rng);
  EXPECT_EQ(est.mean, 0.0);
  EXPECT_THROW(contraction_estimate(api, p2(0, 0), p2(0, 0), 99, rng), std::invalid_argument);
}

TEST(SingleScaleVariation, AlternativeApiHonoursContract) {
  Rng rng(8);
  const Domain box = Domain::unit_box(3);
  const SingleScaleGaussianApi api(box, 0.1, 6);
  EXPECT_EQ(api.contract().v, 7);
  const Point z1 = Eigen::Vector3d(0.1, 0.1, 0.1), z2 = Eigen::Vector3d(0.9, 0.8, 0.7);
  const Dataset V = api.vary(z1, rng);
  EXPECT_EQ(V.cols(), 7);
  EXPECT_EQ(V.col(0), z1);
  const ContractionEstimate est = contraction_estimate(api, z1, z2, 1000, rng);
  EXPECT_LE(est.mean, contraction_bound(api.contract(), z1, z2) + 3 * est.std_error);
}

}  // namespace
}  // namespace pelab
