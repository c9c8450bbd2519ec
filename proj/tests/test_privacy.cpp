#include "privmdp/experiments.hpp"
#include "privmdp/privacy.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace privmdp;

TEST(AlphaBound, ClosedForm) {
  // sqrt(log(10) / 16), evaluated in 30-digit arithmetic.
  EXPECT_NEAR(alpha_bound(7.0, 0.1), 0.37935678234628659, 1e-15);
  EXPECT_EQ(alpha_bound(7.0, 1.0), 0.0);
  EXPECT_NEAR(alpha_bound<long double>(7.0L, 0.1L), 0.379356782346286588L, 1e-18L);
}

TEST(AlphaBound, DecreasingInKAndBeta) {
  for (double k = 0.1; k < 1e6; k *= 3.0) {
    EXPECT_LT(alpha_bound(3.0 * k, 0.05), alpha_bound(k, 0.05));
    EXPECT_LT(alpha_bound(k, 0.2), alpha_bound(k, 0.05));
  }
}

TEST(AlphaBound, RejectsOutOfRange) {
  EXPECT_THROW(alpha_bound(0.0, 0.1), InvalidInput);
  EXPECT_THROW(alpha_bound(-1.0, 0.1), InvalidInput);
  EXPECT_THROW(alpha_bound(1.0, 0.0), InvalidInput);
  EXPECT_THROW(alpha_bound(1.0, 1.5), InvalidInput);
  EXPECT_THROW(PrivacyParams::make(1.0, 1.0), InvalidInput);
  EXPECT_EQ(PrivacyParams::make(10.0, 0.05).alpha, alpha_bound(10.0, 0.05));
}

TEST(RngStream, SameIdReproducesDistinctIdsDiffer) {
  RngStream a(7, StreamId{1, 2, 3}), b(7, StreamId{1, 2, 3}), c(7, StreamId{1, 3, 2});
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
  }
  RngStream u(1);
  for (int i = 0; i < 100'000; ++i) {
    const double x = u.uniform();
    ASSERT_GT(x, 0.0);
    ASSERT_LT(x, 1.0);
  }
}

TEST(Gamma, MeanAndVarianceAcrossShapes) {
  RngStream rng(11, StreamId{0, 0, 0, domain::kTest});
  for (double shape : {0.05, 0.3, 1.0, 2.5, 40.0}) {
    const int n = 200'000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = std::exp(sample_log_gamma(shape, rng));
      sum += g;
      sum_sq += g * g;
    }
    const double mean = sum / n, var = sum_sq / n - mean * mean;
    EXPECT_NEAR(mean, shape, 5.0 * std::sqrt(shape / n)) << "shape " << shape;
    EXPECT_NEAR(var / shape, 1.0, shape < 0.1 ? 0.15 : 0.05) << "shape " << shape;
  }
}

TEST(Dirichlet, OnePointSimplex) {
  RngStream rng(1);
  const ProbVector one = ProbVector::from(VectorXd::Ones(1));
  EXPECT_EQ(dirichlet_sample(one, 3.0, rng), one);
}

TEST(Dirichlet, RejectsBoundaryInputAndBadScale) {
  RngStream rng(1);
  EXPECT_THROW(dirichlet_sample(ProbVector::point_mass(3, 0), 3.0, rng), InvalidInput);
  EXPECT_THROW(dirichlet_sample(ProbVector::uniform(3), 0.0, rng), InvalidInput);
}

TEST(Dirichlet, SymmetricBetaMoments) {
  RngStream rng(3, StreamId{0, 0, 0, domain::kTest});
  const ProbVector p = ProbVector::uniform(2);
  const int n = 100'000;
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const VectorXd x = dirichlet_sample(p, 9.0, rng).vec();
    ASSERT_NEAR(x.sum(), 1.0, 1e-12);
    sum += x;
    sum_sq += x[0] * x[0];
  }
  const Eigen::Vector2d mean = sum / n;
  const double stderr_mean = std::sqrt(0.025 / n);
  EXPECT_NEAR(mean[0], 0.5, 3.0 * stderr_mean);
  EXPECT_NEAR(mean[1], 0.5, 3.0 * stderr_mean);
  EXPECT_NEAR((sum_sq / n - mean[0] * mean[0]) / 0.025, 1.0, 0.05);
}

TEST(Dirichlet, SmallShapesStayOnTheSimplex) {
  RngStream rng(5);
  const ProbVector p = ProbVector::from(Eigen::Vector3d(1e-4, 0.5, 0.5 - 1e-4));
  for (int i = 0; i < 10'000; ++i) {
    const VectorXd x = dirichlet_sample(p, 0.5, rng).vec();
    ASSERT_TRUE(x.allFinite());
    ASSERT_GE(x.minCoeff(), 0.0);
    ASSERT_NEAR(x.sum(), 1.0, 1e-12);
  }
}

TEST(Dirichlet, UnionBoundedConcentration) {
  // Each Beta marginal is 1/(4(k+1))-subgaussian, so the max deviation over
  // n coordinates exceeds alpha with probability at most 2 n beta.
  RngStream rng(8, StreamId{0, 0, 0, domain::kTest});
  const ProbVector p = ProbVector::from((VectorXd(5) << 0.1, 0.15, 0.2, 0.25, 0.3).finished());
  for (double k : {1.0, 20.0}) {
    for (double beta : {0.01, 0.05}) {
      const double radius = alpha_bound(k, beta);
      int tails = 0;
      const int n = 20'000;
      for (int i = 0; i < n; ++i)
        tails += (dirichlet_sample(p, k, rng).vec() - p.vec()).cwiseAbs().maxCoeff() >= radius;
      EXPECT_LE(static_cast<double>(tails) / n, 2.0 * 5 * beta);
    }
  }
}

TEST(Adjacency, TwoCoordinateTransferWithinBudget) {
  RngStream rng(4);
  const ProbVector p = ProbVector::uniform(2);
  for (int i = 0; i < 10'000; ++i) {
    const ProbVector q = adjacent_pair(p, 0.2, rng);
    ASSERT_NEAR(q[0] + q[1], 1.0, 1e-15);
    ASSERT_LE(std::abs(q[0] - 0.5) * 2.0, 0.2 + 1e-15);
    ASSERT_TRUE(is_b_adjacent(p, q, 0.2));
  }
}

TEST(Adjacency, Rules) {
  const ProbVector p = ProbVector::from(Eigen::Vector3d(0.2, 0.3, 0.5));
  EXPECT_TRUE(is_b_adjacent(p, ProbVector::from(Eigen::Vector3d(0.25, 0.25, 0.5)), 0.1));
  EXPECT_FALSE(is_b_adjacent(p, ProbVector::from(Eigen::Vector3d(0.25, 0.25, 0.5)), 0.09));
  EXPECT_FALSE(is_b_adjacent(p, p, 0.1));
  EXPECT_FALSE(is_b_adjacent(p, ProbVector::from(Eigen::Vector3d(0.22, 0.33, 0.45)), 1.0));
  RngStream rng(1);
  EXPECT_THROW(adjacent_pair(ProbVector::from(VectorXd::Ones(1)), 0.5, rng), InvalidInput);
  EXPECT_THROW(adjacent_pair(p, 0.0, rng), InvalidInput);
}

TEST(Privatize, DeterministicAndRowIndependent) {
  const Mdp m = build_example2(5);
  const RngStream base(99, StreamId{4});
  const PrivatizedMdp a = privatize_kernel(m, 20.0, base);
  const PrivatizedMdp b = privatize_kernel(m, 20.0, base);
  EXPECT_EQ(a.model().kernel(), b.model().kernel());
  EXPECT_EQ(a.model().rewards(), m.rewards());
  EXPECT_EQ(a.model().terminal(), m.terminal());
  EXPECT_EQ(a.model().horizon(), m.horizon());
  EXPECT_DOUBLE_EQ(a.k(), 20.0);

  // Row (s, a) uses its own stream, so drawing it alone gives the same row.
  for (Index s : {0, 7, 19}) {
    RngStream row(99, StreamId{4, static_cast<std::uint64_t>(s), 3, domain::kPrivatize});
    const VectorXd alone =
        dirichlet_sample(ProbVector::from(m.kernel().row(m.pair(s, 3)).transpose()), 20.0, row).vec();
    EXPECT_EQ(alone, a.model().kernel().row(m.pair(s, 3)).transpose());
  }
  EXPECT_NE(privatize_kernel(m, 20.0, RngStream(99, StreamId{5})).model().kernel(), a.model().kernel());
}

TEST(Privatize, LargeKStaysClose) {
  MatrixXd k(2, 2);
  k << 0.3, 0.7, 0.6, 0.4;
  const Mdp m({"s0", "s1"}, {{"a"}, {"a"}}, VectorXd::Zero(2), k, Horizon::finite(1), 1.0, VectorXd::Zero(2));
  int close = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const PrivatizedMdp p = privatize_kernel(m, 1e6, RngStream(1, StreamId{trial}));
    close += (p.model().kernel() - k).cwiseAbs().maxCoeff() <= 0.01;
  }
  EXPECT_GE(close, 198);
}

TEST(Privatize, StrictModeListsNonInteriorRows) {
  try {
    privatize_kernel(build_example1(), 5.0, RngStream(1));
    FAIL() << "expected rejection";
  } catch (const InvalidInput& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("(s0,startup1)"), std::string::npos) << what;
    EXPECT_NE(what.find("(Hit,stay)"), std::string::npos) << what;
  }
}

TEST(Privatize, SupportModeKeepsStructuralZeros) {
  const Mdp m = build_example1();
  const PrivatizedMdp p = privatize_kernel(m, 5.0, RngStream(1), PrivatizeOptions{true});
  EXPECT_TRUE(validate_mdp(p.model()).empty());
  for (Index sa = 0; sa < m.num_pairs(); ++sa)
    for (Index j = 0; j < 3; ++j)
      if (m.kernel()(sa, j) == 0.0) {
        EXPECT_EQ(p.model().kernel()(sa, j), 0.0);
      }
  EXPECT_EQ(p.model().kernel().row(4), m.kernel().row(4));  // absorbing Hit
}
