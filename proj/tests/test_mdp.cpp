#include "privmdp/experiments.hpp"
#include "privmdp/mdp.hpp"
#include "privmdp/validation/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace privmdp;

namespace {

Mdp two_state(const MatrixXd& kernel, Horizon horizon, double discount) {
  return Mdp({"s0", "s1"}, {{"a0"}, {"a0"}}, VectorXd::Zero(2), kernel, horizon, discount, VectorXd::Zero(2));
}

bool contains(const std::vector<std::string>& list, const std::string& needle) {
  return std::find(list.begin(), list.end(), needle) != list.end();
}

}  // namespace

TEST(ProbVector, RenormalizesWithinToleranceOnly) {
  const ProbVector p = ProbVector::from(Eigen::Vector2d(0.5, 0.5 + 5e-10));
  EXPECT_TRUE(p.renormalized());
  EXPECT_DOUBLE_EQ(p.vec().sum(), 1.0);
  EXPECT_FALSE(ProbVector::from(Eigen::Vector2d(0.25, 0.75)).renormalized());
  EXPECT_THROW(ProbVector::from(Eigen::Vector2d(0.5, 0.6)), InvalidInput);
  EXPECT_THROW(ProbVector::from(Eigen::Vector2d(-0.1, 1.1)), InvalidInput);
  EXPECT_THROW(ProbVector::from(VectorXd()), InvalidInput);
}

TEST(ProbVector, SmoothMixesWithUniform) {
  const ProbVector p = smooth(ProbVector::point_mass(4, 1), 0.2);
  EXPECT_NEAR(p[0], 0.05, 1e-15);
  EXPECT_NEAR(p[1], 0.85, 1e-15);
  EXPECT_TRUE(p.is_interior());
}

TEST(ValidateMdp, WellFormedModelHasNoViolations) {
  MatrixXd k(2, 2);
  k << 0.3, 0.7, 1.0, 0.0;
  EXPECT_TRUE(validate_mdp(two_state(k, Horizon::finite(2), 1.0)).empty());
}

TEST(ValidateMdp, NamesTheOffendingRow) {
  MatrixXd k(2, 2);
  k << 0.5, 0.6, 0.5, 0.5;
  const auto v = validate_mdp(two_state(k, Horizon::finite(1), 1.0));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "row sum 1.1 ≠ 1 at (s0,a0)");
}

TEST(ValidateMdp, InfiniteHorizonNeedsDiscountBelowOne) {
  MatrixXd k(2, 2);
  k << 0.5, 0.5, 0.5, 0.5;
  const auto v = validate_mdp(two_state(k, Horizon::infinite(), 1.0));
  EXPECT_TRUE(contains(v, "discount must be < 1 for infinite horizon"));
  EXPECT_THROW(require_valid(two_state(k, Horizon::infinite(), 1.0)), InvalidInput);
}

TEST(ValidateMdp, RecordsRenormalizedRows) {
  MatrixXd k(2, 2);
  k << 0.5, 0.5 + 4e-10, 0.5, 0.5;
  const Mdp m = two_state(k, Horizon::finite(1), 1.0);
  EXPECT_EQ(m.renormalized_rows(), 1);
  EXPECT_TRUE(validate_mdp(m).empty());
}

TEST(ValidateMdp, ConstructorRejectsShapeMismatch) {
  EXPECT_THROW(Mdp({"s0"}, {{"a"}}, VectorXd::Zero(2), MatrixXd::Ones(1, 1), Horizon::finite(1), 1.0,
                   VectorXd::Zero(1)),
               InvalidInput);
  EXPECT_THROW(Mdp({"s0"}, {{}, {"a"}}, VectorXd::Zero(1), MatrixXd::Ones(1, 1), Horizon::finite(1), 1.0,
                   VectorXd::Zero(1)),
               InvalidInput);
}

TEST(ValidateMdp, StateWithoutActionsIsAViolation) {
  const Mdp m({"s0", "s1"}, {{"a"}, {}}, VectorXd::Zero(1), MatrixXd::Constant(1, 2, 0.5), Horizon::finite(1), 1.0,
              VectorXd::Zero(2));
  EXPECT_FALSE(validate_mdp(m).empty());
}

TEST(Policy, ViolationsDetectWrongStageCountAndRows) {
  const Mdp m = build_example1();
  const Policy ok = Policy::deterministic(m, {2, 0, 0});
  EXPECT_TRUE(policy_violations(m, ok).empty());
  VectorXd bad = VectorXd::Zero(m.num_pairs());
  bad[0] = 0.7;
  bad[4] = bad[5] = 1.0;
  EXPECT_FALSE(policy_violations(m, Policy::stationary(bad)).empty());
  const VectorXd rule = ok.rule(0);
  EXPECT_FALSE(policy_violations(m, Policy::time_varying({rule, rule})).empty());
  EXPECT_THROW(evaluate_policy_finite(m, Policy::time_varying({rule, rule})), InvalidInput);
}

TEST(EvaluateFinite, ExampleOneStartupOne) {
  const Mdp m = build_example1();
  const ValueFunction v = evaluate_policy_finite(m, Policy::deterministic(m, {0, 0, 0}));
  EXPECT_NEAR(v.initial()[0], 0.9, 1e-15);
  ASSERT_EQ(v.stages.size(), 2u);
  EXPECT_EQ(v.stages.back(), m.terminal());
}

TEST(EvaluateFinite, RewardFreeConstantTerminalPropagates) {
  const Mdp base = build_example2(3);
  const Mdp m(base.states(), base.action_sets(), VectorXd::Zero(base.num_pairs()), base.kernel(), base.horizon(), 1.0,
              VectorXd::Constant(base.num_states(), 2.5));
  const ValueFunction v = evaluate_policy_finite(m, Policy::deterministic(m, std::vector<Index>(20, 1)));
  for (const VectorXd& stage : v.stages) EXPECT_LT((stage.array() - 2.5).abs().maxCoeff(), 1e-12);
}

TEST(EvaluateFinite, MatchesTrajectoryEnumeration) {
  RngStream rng(5, StreamId{0, 0, 0, domain::kTest});
  for (int trial = 0; trial < 20; ++trial) {
    const Mdp m = build_random_mdp({3, 2, 2, 0.9}, 100 + static_cast<std::uint64_t>(trial));
    std::vector<VectorXd> rules;
    for (int t = 0; t < 2; ++t) {
      VectorXd rule(m.num_pairs());
      for (Index s = 0; s < 3; ++s) {
        const double w = rng.uniform();
        rule.segment(m.pair_begin(s), 2) << w, 1.0 - w;
      }
      rules.push_back(rule);
    }
    const Policy pi = Policy::time_varying(rules);
    EXPECT_LT((evaluate_policy_finite(m, pi).initial() - oracle::trajectory_expectation(m, pi)).cwiseAbs().maxCoeff(),
              1e-12);
  }
}

TEST(EvaluateInfinite, GeometricSeries) {
  const Mdp m({"s"}, {{"a"}}, VectorXd::Ones(1), MatrixXd::Ones(1, 1), Horizon::infinite(), 0.5, VectorXd::Zero(1));
  const double tol = 1e-9;
  EXPECT_NEAR(evaluate_policy_infinite(m, Policy::stationary(VectorXd::Ones(1)), tol).initial()[0], 2.0, tol);
}

TEST(EvaluateInfinite, NearMyopicDiscount) {
  const Mdp base = build_random_mdp({4, 3, 0, 0.001}, 9);
  VectorXd rule = VectorXd::Zero(base.num_pairs());
  for (Index s = 0; s < 4; ++s) rule.segment(base.pair_begin(s), 3) << 0.2, 0.3, 0.5;
  const double tol = 1e-6;
  const VectorXd v = evaluate_policy_infinite(base, Policy::stationary(rule), tol).initial();
  for (Index s = 0; s < 4; ++s) {
    const double myopic = rule.segment(base.pair_begin(s), 3).dot(base.rewards().segment(base.pair_begin(s), 3));
    // The discounted tail adds at most gamma * r_max / (1 - gamma).
    EXPECT_NEAR(v[s], myopic, tol + 0.001 / 0.999);
  }
}

TEST(EvaluateInfinite, MatchesLinearSolveAndResidualContract) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Mdp m = build_random_mdp({2, 2, 0, 0.9}, seed);
    const Policy pi = Policy::deterministic(m, {static_cast<Index>(seed % 2), 1});
    const double tol = 1e-9;
    const VectorXd v = evaluate_policy_infinite(m, pi, tol).initial();
    EXPECT_LT((v - oracle::linear_solve_value(m, pi)).cwiseAbs().maxCoeff(), tol);
    const DenseModel<double> dense(m);
    EXPECT_LE((v - dense.average(pi.rule(0), dense.backup(v))).cwiseAbs().maxCoeff(), tol * 0.1 / 0.9);
  }
}

TEST(EvaluateInfinite, RejectsTimeVaryingPolicyAndBadTolerance) {
  const Mdp m = build_random_mdp({2, 1, 0, 0.5}, 1);
  const VectorXd rule = VectorXd::Ones(2);
  EXPECT_THROW(evaluate_policy_infinite(m, Policy::time_varying({rule}), 1e-6), InvalidInput);
  EXPECT_THROW(evaluate_policy_infinite(m, Policy::stationary(rule), 0.0), InvalidInput);
}

TEST(Horizon, InfiniteHasNoStepCount) {
  EXPECT_THROW(Horizon::infinite().steps(), InvalidInput);
  EXPECT_EQ(Horizon::finite(4).steps(), 4);
}
