#pragma once

#include "privmdp/mdp.hpp"
#include "privmdp/privacy.hpp"

namespace privmdp {

struct SynthesisResult {
  Policy policy;
  ValueFunction value;
  /// Value-iteration sweeps (infinite horizon only).
  int iterations = 0;
  /// ||V - T V||_inf of the returned value under the optimality operator T.
  double residual = 0.0;
};

/// Backward induction. The returned policy is deterministic and time-varying;
/// argmax ties resolve to the lowest action index.
SynthesisResult synthesize_finite(const Mdp& mbar);

/// Value iteration from zero until successive iterates differ by at most
/// tol (1 - gamma) / (2 gamma), then the greedy stationary policy.
SynthesisResult synthesize_infinite(const Mdp& mbar, double tol);

SynthesisResult synthesize(const Mdp& mbar, double tol);

/// Greedy (lowest-index) action of every state for the given successor values.
std::vector<Index> greedy_actions(const Mdp& m, const VectorXd& next_values);

struct PipelineResult {
  PrivatizedMdp privatized;
  SynthesisResult synthesis;
};

/// Privatize, then synthesize on the privatized model only.
SynthesisResult synthesize(const PrivatizedMdp& mbar, double tol);

PipelineResult run_pipeline(const Mdp& m, double k, const RngStream& rng, double tol, PrivatizeOptions options = {});

}  // namespace privmdp
