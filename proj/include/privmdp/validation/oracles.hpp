#pragma once

// Brute-force reference computations. None of these call the solvers they
// are used to check.

#include "privmdp/lp.hpp"
#include "privmdp/mdp.hpp"

#include <optional>

namespace privmdp::oracle {

/// Minimum of a bounded LP by enumerating every basic solution (all
/// equalities plus n - m_eq active inequalities or bounds). nullopt if no
/// basic solution is feasible.
std::optional<double> lp_vertex_enumeration(const LinearProgram& lp, double feasibility = 1e-9);

/// Finite-horizon stage-0 values by summing over every action/next-state
/// sequence, weighted by its probability.
VectorXd trajectory_expectation(const Mdp& m, const Policy& pi);

/// Stationary policy value from the linear system (I - gamma P_pi) v = r_pi.
VectorXd linear_solve_value(const Mdp& m, const Policy& pi);

/// Elementwise maximum of stage-0 values over every deterministic Markovian
/// policy (|A|^(|S| T) of them).
VectorXd best_deterministic_value(const Mdp& m);

struct GridBounds {
  VectorXd lower;
  VectorXd upper;
};

/// Pessimistic/optimistic stage-0 values for two-state models, with each
/// inner extremum replaced by a search over a grid of (P1, P2) with the
/// given resolution.
GridBounds grid_search_bounds(const Mdp& mbar, const Policy& pi, double alpha, double beta, double resolution);

}  // namespace privmdp::oracle
