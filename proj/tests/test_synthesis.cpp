#include "privmdp/experiments.hpp"
#include "privmdp/synthesis.hpp"
#include "privmdp/validation/oracles.hpp"

#include <gtest/gtest.h>

using namespace privmdp;

TEST(SynthesizeFinite, ExampleOneWithoutPrivatization) {
  const Mdp m = build_example1();
  const SynthesisResult r = synthesize_finite(m);
  EXPECT_EQ(m.actions(0)[static_cast<std::size_t>(r.policy.action_at(m, 0, 0))], "startup1");
  EXPECT_NEAR(r.value.initial()[0], 0.9, 1e-15);
  EXPECT_EQ(r.value.stages.back(), m.terminal());
}

TEST(SynthesizeFinite, TiesBreakToLowestIndex) {
  const Mdp base = build_random_mdp({3, 1, 3, 1.0}, 4);
  const Mdp m = duplicate_actions(duplicate_actions(base));
  const SynthesisResult r = synthesize_finite(m);
  for (Index t = 0; t < 3; ++t)
    for (Index s = 0; s < 3; ++s) EXPECT_EQ(r.policy.action_at(m, t, s), 0);
  EXPECT_LT((r.value.initial() - synthesize_finite(base).value.initial()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SynthesizeFinite, MatchesPolicyEnumeration) {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Mdp m = build_random_mdp({3, 3, 2, seed % 2 ? 1.0 : 0.8}, seed);
    const SynthesisResult r = synthesize_finite(m);
    EXPECT_LT((r.value.initial() - oracle::best_deterministic_value(m)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((evaluate_policy_finite(m, r.policy).initial() - r.value.initial()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SynthesizeFinite, BellmanResidualIsRoundoff) {
  const Mdp m = build_example2(12);
  const SynthesisResult r = synthesize_finite(m);
  const DenseModel<double> dense(m);
  for (Index t = 0; t < 10; ++t) {
    const VectorXd q = dense.backup(r.value.at(t + 1));
    for (Index s = 0; s < m.num_states(); ++s)
      EXPECT_NEAR(q.segment(m.pair_begin(s), m.num_actions(s)).maxCoeff(), r.value.at(t)[s], 1e-12);
  }
}

TEST(SynthesizeInfinite, SingleStateTwoRewards) {
  const Mdp m({"s"}, {{"low", "high"}}, Eigen::Vector2d(1.0, 2.0), MatrixXd::Ones(2, 1), Horizon::infinite(), 0.9,
              VectorXd::Zero(1));
  const double tol = 1e-9;
  const SynthesisResult r = synthesize_infinite(m, tol);
  EXPECT_NEAR(r.value.initial()[0], 20.0, tol);
  EXPECT_EQ(r.policy.action_at(m, 0, 0), 1);
  EXPECT_TRUE(r.policy.is_stationary());
}

TEST(SynthesizeInfinite, ResidualAndSelfConsistency) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Mdp m = build_random_mdp({4, 3, 0, 0.95}, seed);
    const double tol = 1e-8;
    const SynthesisResult r = synthesize_infinite(m, tol);
    EXPECT_GT(r.iterations, 0);
    EXPECT_LE(r.residual, tol * 0.05 / 0.95);
    EXPECT_LT((evaluate_policy_infinite(m, r.policy, tol).initial() - r.value.initial()).cwiseAbs().maxCoeff(),
              2.0 * tol);
  }
}

TEST(Pipeline, LargeKRecoversTheNonPrivatePolicy) {
  const Mdp m = build_example1();
  int agree = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PipelineResult r = run_pipeline(m, 1e8, RngStream(seed), 1e-8, PrivatizeOptions{true});
    agree += r.synthesis.policy.action_at(m, 0, 0) == 0;
  }
  EXPECT_GE(agree, 99);
}

TEST(Pipeline, DeterministicAndConsistentWithEvaluation) {
  const Mdp m = build_example2(3);
  const PipelineResult a = run_pipeline(m, 30.0, RngStream(8, StreamId{2}), 1e-8);
  const PipelineResult b = run_pipeline(m, 30.0, RngStream(8, StreamId{2}), 1e-8);
  EXPECT_EQ(a.privatized.model().kernel(), b.privatized.model().kernel());
  EXPECT_EQ(a.synthesis.value.initial(), b.synthesis.value.initial());
  for (Index t = 0; t < 10; ++t)
    for (Index s = 0; s < 20; ++s)
      EXPECT_EQ(a.synthesis.policy.action_at(m, t, s), b.synthesis.policy.action_at(m, t, s));
  const ValueFunction v = evaluate_policy(a.privatized.model(), a.synthesis.policy);
  EXPECT_LT((v.initial() - a.synthesis.value.initial()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NE(a.privatized.model().kernel(), m.kernel());
}

TEST(Pipeline, InfiniteHorizon) {
  const Mdp m = build_random_mdp({5, 2, 0, 0.9}, 6);
  const double tol = 1e-8;
  const PipelineResult r = run_pipeline(m, 50.0, RngStream(3), tol);
  EXPECT_TRUE(r.synthesis.policy.is_stationary());
  EXPECT_LT((evaluate_policy(r.privatized.model(), r.synthesis.policy, tol).initial() - r.synthesis.value.initial())
                .cwiseAbs()
                .maxCoeff(),
            2.0 * tol);
}
