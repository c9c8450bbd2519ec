#include "privmdp/synthesis.hpp"

namespace privmdp {

namespace {

Index best_in_segment(const VectorXd& q, Index begin, Index n) {
  Index best = 0;
  for (Index a = 1; a < n; ++a)
    if (q[begin + a] > q[begin + best]) best = a;
  return best;
}

VectorXd state_maxima(const Mdp& m, const VectorXd& q) {
  VectorXd out(m.num_states());
  for (Index s = 0; s < m.num_states(); ++s) out[s] = q.segment(m.pair_begin(s), m.num_actions(s)).maxCoeff();
  return out;
}

}  // namespace

std::vector<Index> greedy_actions(const Mdp& m, const VectorXd& next_values) {
  const VectorXd q = m.rewards() + m.discount() * (m.kernel() * next_values);
  std::vector<Index> out(static_cast<std::size_t>(m.num_states()));
  for (Index s = 0; s < m.num_states(); ++s)
    out[static_cast<std::size_t>(s)] = best_in_segment(q, m.pair_begin(s), m.num_actions(s));
  return out;
}

SynthesisResult synthesize_finite(const Mdp& mbar) {
  require_valid(mbar);
  if (!mbar.horizon().is_finite()) throw InvalidInput("synthesize_finite: model has an infinite horizon");

  const auto T = static_cast<std::size_t>(mbar.horizon().steps());
  ValueFunction value{false, std::vector<VectorXd>(T + 1)};
  std::vector<VectorXd> rules(T);
  value.stages[T] = mbar.terminal();
  for (std::size_t t = T; t-- > 0;) {
    const auto actions = greedy_actions(mbar, value.stages[t + 1]);
    rules[t] = Policy::deterministic(mbar, actions).rule(0);
    const VectorXd q = mbar.rewards() + mbar.discount() * (mbar.kernel() * value.stages[t + 1]);
    value.stages[t] = state_maxima(mbar, q);
  }
  return SynthesisResult{Policy::time_varying(std::move(rules)), std::move(value), 0, 0.0};
}

SynthesisResult synthesize_infinite(const Mdp& mbar, double tol) {
  require_valid(mbar);
  if (mbar.horizon().is_finite()) throw InvalidInput("synthesize_infinite: model has a finite horizon");
  if (!(tol > 0.0)) throw InvalidInput("synthesize_infinite: tol must be positive");

  const double gamma = mbar.discount();
  const DenseModel<double> model(mbar);
  auto optimality = [&](const VectorXd& v) { return state_maxima(mbar, model.backup(v)); };
  auto fp = iterate_to_fixed_point<double>(optimality, mbar.num_states(), tol * (1.0 - gamma) / (2.0 * gamma));

  const double residual = (fp.value - optimality(fp.value)).cwiseAbs().maxCoeff();
  Policy policy = Policy::deterministic(mbar, greedy_actions(mbar, fp.value));
  return SynthesisResult{std::move(policy), ValueFunction{true, {std::move(fp.value)}}, fp.trace.iterations, residual};
}

SynthesisResult synthesize(const Mdp& mbar, double tol) {
  return mbar.horizon().is_finite() ? synthesize_finite(mbar) : synthesize_infinite(mbar, tol);
}

SynthesisResult synthesize(const PrivatizedMdp& mbar, double tol) { return synthesize(mbar.model(), tol); }

PipelineResult run_pipeline(const Mdp& m, double k, const RngStream& rng, double tol, PrivatizeOptions options) {
  PrivatizedMdp privatized = privatize_kernel(m, k, rng, options);
  SynthesisResult synthesis = synthesize(privatized, tol);
  return PipelineResult{std::move(privatized), std::move(synthesis)};
}

}  // namespace privmdp
