#pragma once

#include "privmdp/prob_vector.hpp"
#include "privmdp/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace privmdp {

class Horizon {
 public:
  static Horizon finite(int steps) { return Horizon(steps); }
  static Horizon infinite() { return Horizon(std::nullopt); }

  bool is_finite() const { return steps_.has_value(); }
  /// Number of decision stages T. Throws for infinite horizons.
  int steps() const;

  friend bool operator==(const Horizon&, const Horizon&) = default;

 private:
  explicit Horizon(std::optional<int> steps) : steps_(steps) {}
  std::optional<int> steps_;
};

/// Finite MDP (S, A_s, r, P, T, gamma) with terminal rewards.
///
/// State-action pairs are flattened in state-major order: the actions of
/// state s occupy pair indices [pair_begin(s), pair_end(s)). `kernel()` has
/// one row per pair and one column per next state.
///
/// Construction only checks that the arrays can be indexed; everything else
/// is reported by validate_mdp(). Kernel rows whose sum is within
/// tol::kSimplex of one are divided by their sum, and counted in
/// `renormalized_rows()`.
class Mdp {
 public:
  Mdp(std::vector<std::string> states, std::vector<std::vector<std::string>> actions, VectorXd rewards,
      MatrixXd kernel, Horizon horizon, double discount, VectorXd terminal);

  Index num_states() const { return static_cast<Index>(states_.size()); }
  Index num_pairs() const { return static_cast<Index>(pair_state_.size()); }
  Index num_actions(Index s) const { return pair_end(s) - pair_begin(s); }
  Index max_actions() const;

  Index pair_begin(Index s) const { return offsets_[static_cast<std::size_t>(s)]; }
  Index pair_end(Index s) const { return offsets_[static_cast<std::size_t>(s) + 1]; }
  Index pair(Index s, Index a) const { return pair_begin(s) + a; }
  Index state_of_pair(Index sa) const { return pair_state_[static_cast<std::size_t>(sa)]; }

  const std::vector<std::string>& states() const { return states_; }
  const std::vector<std::string>& actions(Index s) const { return actions_[static_cast<std::size_t>(s)]; }
  const std::vector<std::vector<std::string>>& action_sets() const { return actions_; }
  std::optional<Index> find_state(const std::string& name) const;
  std::string pair_label(Index sa) const;

  const VectorXd& rewards() const { return rewards_; }
  const MatrixXd& kernel() const { return kernel_; }
  const Horizon& horizon() const { return horizon_; }
  double discount() const { return discount_; }
  const VectorXd& terminal() const { return terminal_; }

  int renormalized_rows() const { return renormalized_rows_; }

  /// Same model with the transition kernel replaced.
  Mdp with_kernel(MatrixXd kernel) const;
  Mdp with_horizon(Horizon horizon) const;

 private:
  std::vector<std::string> states_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<Index> offsets_;
  std::vector<Index> pair_state_;
  VectorXd rewards_;
  MatrixXd kernel_;
  Horizon horizon_;
  double discount_;
  VectorXd terminal_;
  int renormalized_rows_ = 0;
};

/// Every invariant violation of `m`; empty iff the model is well formed.
std::vector<std::string> validate_mdp(const Mdp& m);

/// Throws InvalidInput listing the violations, if any.
void require_valid(const Mdp& m);

/// Markovian policy. A decision rule is a vector over the flattened
/// state-action pairs of an Mdp whose per-state segments are distributions
/// over A_s.
class Policy {
 public:
  static Policy stationary(VectorXd rule);
  static Policy time_varying(std::vector<VectorXd> rules);
  /// Point mass on `action[s]` at every state.
  static Policy deterministic(const Mdp& m, const std::vector<Index>& action);

  bool is_stationary() const { return stationary_; }
  Index stages() const { return static_cast<Index>(rules_.size()); }
  /// Decision rule for stage t; a stationary policy ignores t.
  const VectorXd& rule(Index t) const { return rules_[stationary_ ? 0 : static_cast<std::size_t>(t)]; }
  /// Most likely action at (t, s), lowest index on ties.
  Index action_at(const Mdp& m, Index t, Index s) const;

 private:
  Policy(std::vector<VectorXd> rules, bool stationary) : rules_(std::move(rules)), stationary_(stationary) {}
  std::vector<VectorXd> rules_;
  bool stationary_;
};

std::vector<std::string> policy_violations(const Mdp& m, const Policy& pi);

/// Values per stage. Finite-horizon functions carry stages 0..T; stationary
/// ones carry a single vector.
struct ValueFunction {
  bool stationary = false;
  std::vector<VectorXd> stages;

  const VectorXd& at(Index t) const { return stages[stationary ? 0 : static_cast<std::size_t>(t)]; }
  const VectorXd& initial() const { return stages.front(); }
};

/// Per-pair one-step backups r(s,a) + gamma * sum_s' P(s,a,s') v(s').
template <typename Scalar>
struct DenseModel {
  explicit DenseModel(const Mdp& m)
      : kernel(m.kernel().cast<Scalar>()), rewards(m.rewards().cast<Scalar>()), discount(m.discount()), model(&m) {}

  template <typename Derived>
  Vector<Scalar> backup(const Eigen::MatrixBase<Derived>& v) const {
    return rewards + discount * (kernel * v);
  }

  /// sum_a rule(s,a) * q(s,a) for every state.
  template <typename DR, typename DQ>
  Vector<Scalar> average(const Eigen::MatrixBase<DR>& rule, const Eigen::MatrixBase<DQ>& q) const {
    Vector<Scalar> out(model->num_states());
    for (Index s = 0; s < model->num_states(); ++s) {
      const Index b = model->pair_begin(s), n = model->num_actions(s);
      out[s] = rule.segment(b, n).template cast<Scalar>().dot(q.segment(b, n));
    }
    return out;
  }

  Matrix<Scalar> kernel;
  Vector<Scalar> rewards;
  Scalar discount;
  const Mdp* model;
};

/// Successive-iterate gaps of a fixed-point iteration started at zero.
struct ContractionTrace {
  int iterations = 0;
  std::vector<double> gaps;
};

template <typename Scalar>
struct FixedPoint {
  Vector<Scalar> value;
  ContractionTrace trace;
};

/// Iterates v <- step(v) from the zero vector until the sup-norm gap between
/// successive iterates is at most `gap_target`; returns the last iterate.
template <typename Scalar, typename Step>
FixedPoint<Scalar> iterate_to_fixed_point(Step&& step, Index n, Scalar gap_target, int max_iterations = 10'000'000) {
  FixedPoint<Scalar> out;
  Vector<Scalar> v = Vector<Scalar>::Zero(n);
  for (int it = 1; it <= max_iterations; ++it) {
    Vector<Scalar> next = step(v);
    const Scalar gap = n == 0 ? Scalar(0) : (next - v).cwiseAbs().maxCoeff();
    out.trace.gaps.push_back(static_cast<double>(gap));
    out.trace.iterations = it;
    v = std::move(next);
    if (gap <= gap_target) {
      out.value = std::move(v);
      return out;
    }
  }
  throw std::runtime_error("fixed-point iteration did not converge");
}

ValueFunction evaluate_policy_finite(const Mdp& m, const Policy& pi);

/// Stationary policy value, iterated from zero until the returned v satisfies
/// ||v - L v|| <= tol (1 - gamma) / gamma, hence ||v - v_pi|| <= tol.
template <typename Scalar>
FixedPoint<Scalar> policy_fixed_point(const Mdp& m, const Policy& pi, Scalar tol) {
  const DenseModel<Scalar> model(m);
  const Vector<Scalar> rule = pi.rule(0).cast<Scalar>();
  const Scalar gamma = model.discount;
  return iterate_to_fixed_point<Scalar>([&](const Vector<Scalar>& v) { return model.average(rule, model.backup(v)); },
                                        m.num_states(), tol * (Scalar(1) - gamma) / gamma);
}

ValueFunction evaluate_policy_infinite(const Mdp& m, const Policy& pi, double tol);

/// Dispatches on the horizon; `tol` is used for infinite horizons only.
ValueFunction evaluate_policy(const Mdp& m, const Policy& pi, double tol = 1e-10);

}  // namespace privmdp
