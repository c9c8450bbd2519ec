#include "privmdp/lp.hpp"
#include "privmdp/robust_bounds.hpp"
#include "privmdp/rng.hpp"
#include "privmdp/validation/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace privmdp;

TEST(SolveLp, SimplexVertex) {
  LinearProgram lp = nonnegative_lp(Eigen::Vector2d(1.0, 0.0));
  lp.eq_matrix = MatrixXd::Ones(1, 2);
  lp.eq_rhs = VectorXd::Ones(1);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective_value, 0.0, 1e-12);
  EXPECT_NEAR(s.x[0], 0.0, 1e-12);
  EXPECT_NEAR(s.x[1], 1.0, 1e-12);
}

TEST(SolveLp, SingleUpperBoundActive) {
  LinearProgram lp = nonnegative_lp(-VectorXd::Ones(1));
  lp.ub_matrix = MatrixXd::Ones(1, 1);
  lp.ub_rhs = VectorXd::Constant(1, 3.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective_value, -3.0, 1e-12);
  EXPECT_LE(s.max_violation, 1e-8);
}

TEST(SolveLp, FreeAndBoxedVariables) {
  // min x - y  s.t. x + y = 1, x in [-2, inf), y in (-inf, 4]
  LinearProgram lp = nonnegative_lp(Eigen::Vector2d(1.0, -1.0));
  lp.lower << -2.0, -std::numeric_limits<double>::infinity();
  lp.upper << std::numeric_limits<double>::infinity(), 4.0;
  lp.eq_matrix = MatrixXd::Ones(1, 2);
  lp.eq_rhs = VectorXd::Ones(1);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective_value, -5.0, 1e-12);
  EXPECT_NEAR(s.x[0], -2.0, 1e-12);
  EXPECT_NEAR(s.x[1], 3.0, 1e-12);
}

TEST(SolveLp, InfeasibleAndUnbounded) {
  LinearProgram infeasible = nonnegative_lp(VectorXd::Ones(2));
  infeasible.ub_matrix = MatrixXd::Ones(1, 2);
  infeasible.ub_rhs = VectorXd::Constant(1, -1.0);
  EXPECT_EQ(solve_lp(infeasible).status, LpStatus::Infeasible);

  LinearProgram unbounded = nonnegative_lp(Eigen::Vector2d(-1.0, 0.0));
  unbounded.eq_matrix = (MatrixXd(1, 2) << 1.0, -1.0).finished();
  unbounded.eq_rhs = VectorXd::Zero(1);
  EXPECT_EQ(solve_lp(unbounded).status, LpStatus::Unbounded);
}

TEST(SolveLp, RedundantEqualities) {
  LinearProgram lp = nonnegative_lp(Eigen::Vector3d(1.0, 2.0, 3.0));
  lp.eq_matrix = (MatrixXd(3, 3) << 1, 1, 1, 2, 2, 2, 1, 0, -1).finished();
  lp.eq_rhs = Eigen::Vector3d(1.0, 2.0, 0.0);
  const LpSolution s = solve_lp(lp);
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_NEAR(s.objective_value, 2.0, 1e-12);  // x = (1/2, 0, 1/2)
}

TEST(SolveLp, RejectsNonFiniteAndMismatchedInput) {
  LinearProgram lp = nonnegative_lp(VectorXd::Ones(2));
  lp.objective[0] = std::nan("");
  EXPECT_THROW(solve_lp(lp), InvalidInput);
  LinearProgram bad = nonnegative_lp(VectorXd::Ones(2));
  bad.eq_matrix = MatrixXd::Ones(1, 3);
  bad.eq_rhs = VectorXd::Ones(1);
  EXPECT_THROW(solve_lp(bad), InvalidInput);
}

TEST(SolveLp, MatchesVertexEnumerationOnSixVariables) {
  RngStream rng(17, StreamId{0, 0, 0, domain::kTest});
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp = nonnegative_lp(VectorXd::NullaryExpr(6, [&] { return u(-1, 1); }));
    lp.upper = VectorXd::Constant(6, 1.5);
    const VectorXd x0 = VectorXd::NullaryExpr(6, [&] { return u(0, 1); });
    lp.eq_matrix = MatrixXd::NullaryExpr(2, 6, [&] { return u(-1, 1); });
    lp.eq_rhs = lp.eq_matrix * x0;
    lp.ub_matrix = MatrixXd::NullaryExpr(2, 6, [&] { return u(-1, 1); });
    lp.ub_rhs = lp.ub_matrix * x0 + VectorXd::Constant(2, 0.1);
    const LpSolution s = solve_lp(lp);
    const auto reference = oracle::lp_vertex_enumeration(lp);
    ASSERT_EQ(s.status, LpStatus::Optimal);
    ASSERT_TRUE(reference.has_value());
    EXPECT_NEAR(s.objective_value, *reference, 1e-8);
    EXPECT_LE(constraint_violation(lp, s.x), 1e-8);
  }
}

TEST(InnerLp, ShapeForThreeStates) {
  const LinearProgram lp =
      build_inner_lp(Eigen::Vector3d(1, 2, 3), ProbVector::uniform(3), 0.1, 0.2, Direction::Min);
  EXPECT_EQ(lp.num_variables(), 9);
  EXPECT_EQ(lp.num_constraints(), 6 * 3 + 3);
}

TEST(InnerLp, DegenerateSetIsThePrivatizedRow) {
  const ProbVector pbar = ProbVector::from(Eigen::Vector3d(0.2, 0.3, 0.5));
  for (Direction dir : {Direction::Min, Direction::Max}) {
    const LpSolution s = solve_lp(build_inner_lp(Eigen::Vector3d(1, -2, 4), pbar, 0.0, 0.0, dir));
    ASSERT_EQ(s.status, LpStatus::Optimal);
    EXPECT_LT((s.x.tail(3) - pbar.vec()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(std::abs(s.objective_value), 0.2 - 0.6 + 2.0, 1e-12);
  }
}

TEST(InnerLp, RejectsInvalidParameters) {
  const ProbVector pbar = ProbVector::uniform(2);
  EXPECT_THROW(build_inner_lp(VectorXd::Zero(2), pbar, -0.1, 0.5, Direction::Min), InvalidInput);
  EXPECT_THROW(build_inner_lp(VectorXd::Zero(2), pbar, 0.1, 1.5, Direction::Min), InvalidInput);
  EXPECT_THROW(build_inner_lp(VectorXd::Zero(3), pbar, 0.1, 0.5, Direction::Min), InvalidInput);
}

TEST(InnerLp, AgreesWithStructuredSolver) {
  RngStream rng(23, StreamId{0, 0, 0, domain::kTest});
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 2 + static_cast<Index>(rng.uniform() * 7);
    VectorXd values(n), w(n);
    for (Index i = 0; i < n; ++i) {
      values[i] = rng.uniform() * 2 - 1;
      w[i] = -std::log(rng.uniform());
    }
    const double alpha = 0.5 * rng.uniform(), beta = 0.9 * rng.uniform();
    const ProbVector pbar = ProbVector::from(w / w.sum());
    const auto u = UncertaintySet<double>::make(pbar, alpha, beta);
    const LpSolution lo = solve_lp(build_inner_lp(values, pbar, alpha, beta, Direction::Min));
    const LpSolution hi = solve_lp(build_inner_lp(values, pbar, alpha, beta, Direction::Max));
    EXPECT_NEAR(inner_extremum(values, u, Direction::Min).value, lo.objective_value, 1e-9);
    EXPECT_NEAR(inner_extremum(values, u, Direction::Max).value, -hi.objective_value, 1e-9);
  }
}
