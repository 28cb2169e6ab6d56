#include "pelab/transport.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

namespace pelab {
namespace {

Dataset line(std::initializer_list<double> xs) {
  Dataset S(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index j = 0;
  for (double x : xs) S(0, j++) = x;
  return S;
}

Dataset random_points(Eigen::Index d, Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Dataset S(d, n);
  for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = u(rng);
  return S;
}

Eigen::VectorXd random_simplex(Eigen::Index n, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) w[i] = e(rng);
  return w / w.sum();
}

// W1 on the line equals the integral of |F - G|.
double w1_line_oracle(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  std::vector<std::pair<double, double>> events;
  for (Eigen::Index i = 0; i < mu.size(); ++i) events.emplace_back(mu.support(0, i), mu.weights[i]);
  for (Eigen::Index i = 0; i < nu.size(); ++i) events.emplace_back(nu.support(0, i), -nu.weights[i]);
  std::sort(events.begin(), events.end());
  double cdf = 0, total = 0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    cdf += events[k].second;
    total += std::abs(cdf) * (events[k + 1].first - events[k].first);
  }
  return total;
}

// Dual form of the BL norm as a standalone LP: with g = f + D >= 0,
//   max sum sigma_i (g_i - D)  s.t.  g_i <= 2D,  g_i - g_j <= rho_ij.
double bl_dual_oracle(const DiscreteMeasure& sigma, double D) {
  const Eigen::Index m = sigma.size();
  const Eigen::MatrixXd rho = pairwise_distances(sigma.support, sigma.support);
  const Eigen::Index pairs = m * (m - 1);
  const Eigen::Index vars = m + m + pairs;
  LpProblem lp;
  lp.A = Eigen::MatrixXd::Zero(m + pairs, vars);
  lp.b.resize(m + pairs);
  lp.c = Eigen::VectorXd::Zero(vars);
  for (Eigen::Index i = 0; i < m; ++i) {
    lp.c[i] = -sigma.weights[i];
    lp.A(i, i) = 1.0;
    lp.A(i, m + i) = 1.0;
    lp.b[i] = 2 * D;
  }
  Eigen::Index row = m;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i == j) continue;
      lp.A(row, i) = 1.0;
      lp.A(row, j) = -1.0;
      lp.A(row, 2 * m + (row - m)) = 1.0;
      lp.b[row] = rho(i, j);
      ++row;
    }
  }
  return -solve_lp(lp).objective - D * sigma.weights.sum();
}

TEST(W1, Examples) {
  const DiscreteMeasure a = empirical(line({0, 1}));
  EXPECT_DOUBLE_EQ(w1_distance(a, a), 0.0);
  const DiscreteMeasure b = empirical(line({0.5, 1.5}));
  EXPECT_NEAR(w1_distance(a, b), 0.5, 1e-15);
  Dataset p(2, 1), q(2, 1);
  p << 0, 0;
  q << 3, 4;
  EXPECT_NEAR(w1_distance(empirical(p), empirical(q)), 5.0, 1e-15);
}

TEST(W1, RejectsInvalidInputs) {
  const DiscreteMeasure a = empirical(line({0, 1}));
  const DiscreteMeasure neg(line({0, 1}), Eigen::Vector2d(1.5, -0.5));
  EXPECT_THROW(w1_exact(a, neg), std::invalid_argument);
  Dataset p = Dataset::Zero(2, 1);
  EXPECT_THROW(w1_exact(a, empirical(p)), std::invalid_argument);
}

TEST(W1, MatchesLineOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const Eigen::Index m = 1 + trial % 13, k = 1 + trial % 7;
    const DiscreteMeasure mu(random_points(1, m, rng), random_simplex(m, rng));
    const DiscreteMeasure nu(random_points(1, k, rng), random_simplex(k, rng));
    const W1Result r = w1_exact(mu, nu);
    EXPECT_NEAR(r.value, w1_line_oracle(mu, nu), 1e-12);
    EXPECT_LE((r.plan.flow.rowwise().sum() - mu.weights).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((r.plan.flow.colwise().sum().transpose() - nu.weights).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GE(r.plan.flow.minCoeff(), 0.0);
    EXPECT_LE(r.certificate.duality_gap, 1e-10);
  }
}

TEST(W1, MetricProperties) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const DiscreteMeasure a(random_points(3, 8, rng), random_simplex(8, rng));
    const DiscreteMeasure b(random_points(3, 6, rng), random_simplex(6, rng));
    const DiscreteMeasure c(random_points(3, 5, rng), random_simplex(5, rng));
    const double ab = w1_distance(a, b), ba = w1_distance(b, a);
    EXPECT_NEAR(ab, ba, 1e-12);
    EXPECT_LE(w1_distance(a, c), ab + w1_distance(b, c) + 1e-12);
    EXPECT_NEAR(w1_distance(a, a), 0.0, 1e-12);
  }
}

TEST(W1, LargeTransportIsFastAndCertified) {
  std::mt19937_64 rng(3);
  const DiscreteMeasure mu = empirical(random_points(2, 1000, rng));
  const DiscreteMeasure nu = empirical(random_points(2, 300, rng));
  const W1Result r = w1_exact(mu, nu);
  EXPECT_GT(r.value, 0.0);
  EXPECT_LE(r.certificate.duality_gap, 1e-9);
  EXPECT_LE(r.certificate.primal_residual, 1e-12);
}

TEST(BlNorm, Examples) {
  const DiscreteMeasure zero(line({0.2}), Eigen::VectorXd::Zero(1));
  EXPECT_DOUBLE_EQ(bl_norm(zero, 2.0).value, 0.0);
  EXPECT_DOUBLE_EQ(bl_norm(DiscreteMeasure(Dataset(1, 0), Eigen::VectorXd(0)), 2.0).value, 0.0);

  const DiscreteMeasure dipole(line({0, 0.3}), Eigen::Vector2d(1, -1));
  EXPECT_NEAR(bl_norm(dipole, 2.0).value, 0.3, 1e-15);

  const DiscreteMeasure half(line({0}), Eigen::VectorXd::Constant(1, 0.5));
  EXPECT_NEAR(bl_norm(half, 2.0).value, 1.0, 1e-15);

  // Far-apart dipole: cheaper to pay D twice than to transport.
  const DiscreteMeasure far(line({0, 10}), Eigen::Vector2d(1, -1));
  EXPECT_NEAR(bl_norm(far, 2.0).value, 4.0, 1e-15);

  EXPECT_THROW(bl_norm(half, 0.0), std::invalid_argument);
}

TEST(BlNorm, TwoAtomGridOracle) {
  // The dual is linear in f, so its maximum sits at a vertex of the feasible
  // polygon; a fine grid containing those vertices recovers it exactly.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const double D = 1.0;
    const double x = 0.25 * std::round(4 * u(rng)), y = x + 0.25 * (1 + trial % 8);
    const DiscreteMeasure s(line({x, y}), Eigen::Vector2d(u(rng), u(rng)));
    const double rho = y - x;
    double best = -1e300;
    for (int a = -400; a <= 400; ++a) {
      for (int b = -400; b <= 400; ++b) {
        const double f1 = a / 400.0, f2 = b / 400.0;
        if (std::abs(f1 - f2) > rho + 1e-12) continue;
        best = std::max(best, f1 * s.weights[0] + f2 * s.weights[1]);
      }
    }
    EXPECT_NEAR(bl_norm(s, D).value, best, 1e-12) << "trial " << trial;
  }
}

TEST(BlNorm, AgreesWithDualLp) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index m = 1 + trial % 9;
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = g(rng);
    const DiscreteMeasure s(random_points(2, m, rng), w);
    const double D = 0.3 + (trial % 4);
    const BlResult r = bl_norm(s, D);
    EXPECT_NEAR(r.value, bl_dual_oracle(s, D), 1e-9) << "trial " << trial;

    // The witness attains the value and is feasible.
    EXPECT_NEAR(r.witness.dot(s.weights), r.value, 1e-9);
    EXPECT_LE(r.witness.cwiseAbs().maxCoeff(), D + 1e-9);
    const Eigen::MatrixXd rho = pairwise_distances(s.support, s.support);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) EXPECT_LE(r.witness[i] - r.witness[j], rho(i, j) + 1e-9);
    }
    // The decomposition reproduces sigma at the same cost.
    const auto& dec = r.decomposition;
    const Eigen::VectorXd rebuilt = dec.flow.rowwise().sum() - dec.flow.colwise().sum().transpose() +
                                    dec.residual_plus - dec.residual_minus;
    EXPECT_LE((rebuilt - w).cwiseAbs().maxCoeff(), 1e-9);
    const double cost = dec.flow.cwiseProduct(rho).sum() + D * (dec.residual_plus.sum() + dec.residual_minus.sum());
    EXPECT_NEAR(cost, r.value, 1e-9);
  }
}

TEST(BlNorm, NormProperties) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Dataset X = random_points(2, 7, rng);
    Eigen::VectorXd a(7), b(7);
    for (Eigen::Index i = 0; i < 7; ++i) {
      a[i] = g(rng);
      b[i] = g(rng);
    }
    const double na = bl_norm(DiscreteMeasure(X, a), 1.5).value;
    const double nb = bl_norm(DiscreteMeasure(X, b), 1.5).value;
    EXPECT_NEAR(bl_norm(DiscreteMeasure(X, -a), 1.5).value, na, 1e-10);
    EXPECT_NEAR(bl_norm(DiscreteMeasure(X, 2.5 * a), 1.5).value, 2.5 * na, 1e-10);
    EXPECT_LE(bl_norm(DiscreteMeasure(X, a + b), 1.5).value, na + nb + 1e-10);
  }
}

TEST(BlNorm, EqualsW1ForProbabilitiesWhenDCoversDiameter) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 60; ++trial) {
    const DiscreteMeasure mu(random_points(2, 6, rng), random_simplex(6, rng));
    const DiscreteMeasure nu(random_points(2, 5, rng), random_simplex(5, rng));
    const double D = 2.0 * std::sqrt(2.0);  // diameter of [-1,1]^2
    EXPECT_NEAR(bl_norm(signed_difference(mu, nu), D).value, w1_distance(mu, nu), 1e-10);
    // Smaller D can only shrink the norm.
    EXPECT_LE(bl_norm(signed_difference(mu, nu), 0.2).value, w1_distance(mu, nu) + 1e-10);
  }
}

TEST(BlProjection, ProbabilityIsFixedPoint) {
  std::mt19937_64 rng(8);
  const DiscreteMeasure mu(random_points(2, 10, rng), random_simplex(10, rng));
  const BlProjection p = bl_project_simplex(mu, 2.0);
  EXPECT_NEAR(p.objective, 0.0, 1e-12);
  EXPECT_LE((p.measure.weights - mu.weights).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BlProjection, TwoAtomGridOracle) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const DiscreteMeasure mt(line({0, 0.1 + 0.05 * (trial % 10)}), Eigen::Vector2d(u(rng), u(rng)));
    const double D = 1.0;
    const BlProjection p = bl_project_simplex(mt, D);
    double best = 1e300;
    for (int k = 0; k <= 2000; ++k) {
      const double w = k / 2000.0;
      const DiscreteMeasure diff(mt.support, mt.weights - Eigen::Vector2d(w, 1 - w));
      best = std::min(best, bl_norm(diff, D).value);
    }
    EXPECT_NEAR(p.objective, best, 1e-9) << "trial " << trial;
    EXPECT_TRUE(p.measure.is_probability());
    const DiscreteMeasure diff(mt.support, mt.weights - p.measure.weights);
    EXPECT_NEAR(bl_norm(diff, D).value, p.objective, 1e-9);
  }
}

TEST(BlProjection, BeatsRandomCandidates) {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> g(0.1, 0.2);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 3 + trial % 10;
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w[i] = g(rng);
    const DiscreteMeasure mt(random_points(2, m, rng), w);
    const BlProjection p = bl_project_simplex(mt, 2.0);
    EXPECT_TRUE(p.measure.is_probability());
    EXPECT_NEAR(bl_norm(DiscreteMeasure(mt.support, mt.weights - p.measure.weights), 2.0).value, p.objective,
                1e-9);
    for (int c = 0; c < 20; ++c) {
      const Eigen::VectorXd q = random_simplex(m, rng);
      EXPECT_LE(p.objective, bl_norm(DiscreteMeasure(mt.support, mt.weights - q), 2.0).value + 1e-10);
    }
  }
}

TEST(SimplexW1, NearestNeighbourHistogramIsOptimal) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset S = random_points(2, 5 + trial % 10, rng);
    const Dataset V = random_points(2, 2 + trial % 6, rng);
    const SimplexW1Minimum lp = w1_min_over_simplex(S, V);
    const double nn = w1_objective_for_simplex_weights(S, V, nn_histogram(S, V));
    EXPECT_NEAR(lp.value, nn, 1e-10) << "trial " << trial;
    EXPECT_LE(lp.certificate.duality_gap, 1e-9);
  }
}

TEST(SimplexW1, Example) {
  const Dataset S = line({0.0, 0.1, 0.9});
  const Dataset V = line({0.0, 1.0});
  const SimplexW1Minimum r = w1_min_over_simplex(S, V);
  EXPECT_NEAR(r.value, (0.1 + 0.1) / 3.0, 1e-12);
  EXPECT_THROW(w1_min_over_simplex(Dataset(1, 0), V), std::invalid_argument);
}

}  // namespace
}  // namespace pelab
