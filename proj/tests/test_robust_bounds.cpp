#include "privmdp/experiments.hpp"
#include "privmdp/robust_bounds.hpp"
#include "privmdp/validation/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace privmdp;

namespace {

UncertaintySet<double> set(std::initializer_list<double> pbar, double alpha, double beta) {
  VectorXd p(static_cast<Index>(pbar.size()));
  Index i = 0;
  for (double x : pbar) p[i++] = x;
  return UncertaintySet<double>::make(p, alpha, beta);
}

}  // namespace

TEST(InnerExtremum, DegenerateSetReturnsPbar) {
  const auto u = set({0.2, 0.3, 0.5}, 0.0, 0.0);
  const Eigen::Vector3d v(1.0, -1.0, 3.0);
  for (Direction dir : {Direction::Min, Direction::Max}) {
    const Extremum<double> e = inner_extremum(v, u, dir);
    EXPECT_NEAR(e.value, 0.2 - 0.3 + 1.5, 1e-15);
    EXPECT_LT((e.witness - u.pbar()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(InnerExtremum, HalfMixtureClosedForm) {
  const auto u = set({0.5, 0.5}, 0.0, 0.5);
  const Eigen::Vector2d v(1.0, 0.0);
  EXPECT_NEAR(inner_extremum(v, u, Direction::Min).value, 0.25, 1e-15);
  EXPECT_NEAR(inner_extremum(v, u, Direction::Max).value, 0.75, 1e-15);
}

TEST(InnerExtremum, NearOneBetaAndClippedBox) {
  const auto u = set({0.05, 0.9, 0.05}, 0.3, 0.999);
  const Eigen::Vector3d v(0.0, 1.0, 2.0);
  const Extremum<double> lo = inner_extremum(v, u, Direction::Min);
  // Box part: lower bounds (0, 0.6, 0); fill cheapest first to (0.35, 0.65, 0).
  EXPECT_NEAR(lo.value, 0.001 * 0.65, 1e-15);
  EXPECT_TRUE(is_member(lo.witness, u));
}

TEST(InnerExtremum, TiesFillLowestIndexFirst) {
  const auto u = set({0.25, 0.25, 0.25, 0.25}, 0.5, 0.0);
  const Extremum<double> e = inner_extremum(Eigen::Vector4d(1, 0, 0, 1), u, Direction::Min);
  EXPECT_NEAR(e.witness[1], 0.75, 1e-15);
  EXPECT_NEAR(e.witness[2], 0.25, 1e-15);
  EXPECT_NEAR(e.value, 0.0, 1e-15);
}

TEST(InnerExtremum, WitnessIsAMemberAndAttainsValue) {
  RngStream rng(2, StreamId{0, 0, 0, domain::kTest});
  for (int trial = 0; trial < 500; ++trial) {
    const Index n = 1 + static_cast<Index>(rng.uniform() * 8);
    VectorXd w(n), v(n);
    for (Index i = 0; i < n; ++i) {
      w[i] = -std::log(rng.uniform());
      v[i] = rng.uniform() * 4 - 2;
    }
    const auto u = UncertaintySet<double>::make(VectorXd(w / w.sum()), 0.6 * rng.uniform(), 0.95 * rng.uniform());
    for (Direction dir : {Direction::Min, Direction::Max}) {
      const Extremum<double> e = inner_extremum(v, u, dir);
      EXPECT_TRUE(is_member(e.witness, u));
      EXPECT_NEAR(e.witness.dot(v), e.value, 1e-12);
    }
    EXPECT_LE(inner_extremum(v, u, Direction::Min).value, u.pbar().dot(v) + 1e-12);
    EXPECT_GE(inner_extremum(v, u, Direction::Max).value, u.pbar().dot(v) - 1e-12);
  }
}

TEST(UncertaintySetTest, Membership) {
  const auto box = set({0.5, 0.5}, 0.1, 0.0);
  EXPECT_TRUE(is_member(box.pbar(), box));
  EXPECT_TRUE(is_member(VectorXd(Eigen::Vector2d(0.6, 0.4)), box));
  EXPECT_FALSE(is_member(VectorXd(Eigen::Vector2d(0.7, 0.3)), box));
  EXPECT_FALSE(is_member(VectorXd(Eigen::Vector2d(0.5, 0.6)), box));

  const auto mixed = set({0.5, 0.5}, 0.1, 0.5);
  EXPECT_TRUE(is_member(VectorXd(Eigen::Vector2d(0.8, 0.2)), mixed));   // 0.5*(1,0) + 0.5*(0.6,0.4)
  EXPECT_FALSE(is_member(VectorXd(Eigen::Vector2d(0.9, 0.1)), mixed));  // needs P2[1] < 0.4
}

TEST(UncertaintySetTest, RejectsInvalidParameters) {
  EXPECT_THROW(set({0.5, 0.5}, -0.1, 0.0), InvalidInput);
  EXPECT_THROW(set({0.5, 0.5}, 0.1, 1.0), InvalidInput);
  EXPECT_THROW(set({0.5, 0.6}, 0.1, 0.0), InvalidInput);
  const auto u = set({0.5, 0.5}, 0.1, 0.0);
  EXPECT_THROW(inner_extremum(Eigen::Vector3d(1, 2, 3), u, Direction::Min), InvalidInput);
}

TEST(BoundsFinite, CollapseToPrivateValue) {
  const Mdp m = build_example2(2);
  const SynthesisResult r = synthesize_finite(m);
  const BoundPair b = bounds_finite(m, r.policy, UncertaintyParams{0.0, 0.0});
  for (Index t = 0; t <= 10; ++t) {
    EXPECT_LT((b.pessimistic.at(t) - r.value.at(t)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((b.optimistic.at(t) - r.value.at(t)).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_LE(cost_of_privacy(b, 0), 1e-12);
}

TEST(BoundsFinite, ExampleOneHandComputed) {
  const Mdp m = build_example1();
  const Policy pi = Policy::deterministic(m, {0, 0, 0});
  const double alpha = 0.2, beta = 0.1;
  const BoundPair b = bounds_finite(m, pi, UncertaintyParams{alpha, beta});
  // Values (0, 1, 0); row (0, 0.9, 0.1): Min puts P1 on s0 and P2[Hit] at 0.7.
  EXPECT_NEAR(b.pessimistic.initial()[0], 0.9 * 0.7, 1e-15);
  EXPECT_NEAR(b.optimistic.initial()[0], 0.1 + 0.9 * 1.0, 1e-15);
  EXPECT_NEAR(cost_of_privacy(b, 0), 1.0 - 0.63, 1e-15);
}

TEST(BoundsFinite, MatchesGridSearch) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Mdp m = build_random_mdp({2, 2, 2, 1.0, 0.0}, seed);
    const Policy pi = synthesize_finite(m).policy;
    const BoundPair b = bounds_finite(m, pi, UncertaintyParams{0.15, 0.1});
    const oracle::GridBounds g = oracle::grid_search_bounds(m, pi, 0.15, 0.1, 1e-3);
    EXPECT_LT((b.pessimistic.initial() - g.lower).cwiseAbs().maxCoeff(), 2e-3);
    EXPECT_LT((b.optimistic.initial() - g.upper).cwiseAbs().maxCoeff(), 2e-3);
    EXPECT_LE((b.pessimistic.initial() - g.lower).maxCoeff(), 1e-12);  // grid only sees part of the set
    EXPECT_GE((b.optimistic.initial() - g.upper).minCoeff(), -1e-12);
  }
}

TEST(BoundsFinite, MonotoneInAlpha) {
  const Mdp m = build_example2(4);
  const Policy pi = synthesize_finite(m).policy;
  double previous = -1.0;
  for (double alpha : {0.0, 0.01, 0.05, 0.1, 0.3}) {
    const double cop = cost_of_privacy(bounds_finite(m, pi, UncertaintyParams{alpha, 0.05}), 0);
    EXPECT_GE(cop, previous);
    previous = cop;
  }
}

TEST(BoundsInfinite, CollapseAndSandwich) {
  const Mdp m = build_random_mdp({6, 3, 0, 0.9}, 5);
  const double tol = 1e-9;
  const SynthesisResult r = synthesize_infinite(m, tol);
  const VectorXd value = evaluate_policy_infinite(m, r.policy, tol).initial();
  const BoundPair flat = bounds_infinite(m, r.policy, UncertaintyParams{0.0, 0.0}, tol);
  EXPECT_LT((flat.pessimistic.initial() - value).cwiseAbs().maxCoeff(), 2 * tol);
  const BoundPair wide = bounds_infinite(m, r.policy, PrivacyParams::make(50.0, 0.05), tol);
  EXPECT_LE((wide.pessimistic.initial() - value).maxCoeff(), 2 * tol);
  EXPECT_GE((wide.optimistic.initial() - value).minCoeff(), -2 * tol);
  EXPECT_GT(wide.pessimistic_trace.iterations, 1);
  EXPECT_EQ(static_cast<int>(wide.optimistic_trace.gaps.size()), wide.optimistic_trace.iterations);
}

TEST(BoundsInfinite, RejectsTimeVaryingPolicy) {
  const Mdp m = build_random_mdp({2, 1, 0, 0.5}, 1);
  EXPECT_THROW(bounds_infinite(m, Policy::time_varying({VectorXd::Ones(2)}), UncertaintyParams{0.1, 0.1}, 1e-6),
               InvalidInput);
}

TEST(CostOfPrivacy, UnknownStateIsAnError) {
  const Mdp m = build_example1();
  const BoundPair b = bounds_finite(m, Policy::deterministic(m, {0, 0, 0}), UncertaintyParams{0.1, 0.1});
  EXPECT_THROW(cost_of_privacy(b, 3), InvalidInput);
  EXPECT_THROW(cost_of_privacy(b, -1), InvalidInput);
}
