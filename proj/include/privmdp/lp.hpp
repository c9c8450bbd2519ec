#pragma once

#include "privmdp/prob_vector.hpp"
#include "privmdp/types.hpp"

namespace privmdp {

/// minimize c'x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  lower <= x <= upper.
/// Bounds may be -inf / +inf.
struct LinearProgram {
  VectorXd objective;
  MatrixXd eq_matrix;
  VectorXd eq_rhs;
  MatrixXd ub_matrix;
  VectorXd ub_rhs;
  VectorXd lower;
  VectorXd upper;

  Index num_variables() const { return objective.size(); }
  /// Equality rows + inequality rows + finite variable bounds.
  Index num_constraints() const;
};

/// A problem with `n` variables, no rows, and bounds [0, +inf).
LinearProgram nonnegative_lp(VectorXd objective);

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  VectorXd x;               ///< set when Optimal
  double objective_value = 0.0;
  double max_violation = 0.0;  ///< largest constraint or bound residual of x
};

/// Dense two-phase simplex with Bland's rule. Throws InvalidInput on
/// inconsistent dimensions or non-finite data.
LpSolution solve_lp(const LinearProgram& lp);

/// Largest violation of any constraint or bound by `x`.
double constraint_violation(const LinearProgram& lp, const VectorXd& x);

/// The inner problem over the uncertainty set as an explicit LP in the
/// variables (P1, P2, p), each in R^n:
///   simplex constraints on P1, P2, p; |P2 - pbar| <= alpha elementwise;
///   beta P1 + (1 - beta) P2 = p; objective +-values'p.
/// For Direction::Max the objective is negated, so the maximum is
/// -objective_value.
LinearProgram build_inner_lp(const VectorXd& values, const ProbVector& pbar, double alpha, double beta,
                             Direction direction);

}  // namespace privmdp
