#include "privmdp/mdp.hpp"

#include <cmath>
#include <sstream>

namespace privmdp {

int Horizon::steps() const {
  if (!steps_) throw InvalidInput("horizon is infinite");
  return *steps_;
}

Mdp::Mdp(std::vector<std::string> states, std::vector<std::vector<std::string>> actions, VectorXd rewards,
         MatrixXd kernel, Horizon horizon, double discount, VectorXd terminal)
    : states_(std::move(states)),
      actions_(std::move(actions)),
      rewards_(std::move(rewards)),
      kernel_(std::move(kernel)),
      horizon_(horizon),
      discount_(discount),
      terminal_(std::move(terminal)) {
  if (actions_.size() != states_.size()) throw InvalidInput("Mdp: one action list per state is required");
  offsets_.reserve(states_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t s = 0; s < actions_.size(); ++s) {
    offsets_.push_back(offsets_.back() + static_cast<Index>(actions_[s].size()));
    pair_state_.insert(pair_state_.end(), actions_[s].size(), static_cast<Index>(s));
  }
  if (rewards_.size() != num_pairs()) throw InvalidInput("Mdp: rewards must have one entry per state-action pair");
  if (kernel_.rows() != num_pairs()) throw InvalidInput("Mdp: kernel must have one row per state-action pair");

  for (Index sa = 0; sa < kernel_.rows(); ++sa) {
    const double sum = kernel_.row(sa).sum();
    if (beyond_roundoff(sum, kernel_.cols()) && std::abs(sum - 1.0) <= tol::kSimplex &&
        kernel_.row(sa).minCoeff() >= 0.0) {
      kernel_.row(sa) /= sum;
      ++renormalized_rows_;
    }
  }
}

Index Mdp::max_actions() const {
  Index best = 0;
  for (Index s = 0; s < num_states(); ++s) best = std::max(best, num_actions(s));
  return best;
}

std::optional<Index> Mdp::find_state(const std::string& name) const {
  for (std::size_t i = 0; i < states_.size(); ++i)
    if (states_[i] == name) return static_cast<Index>(i);
  return std::nullopt;
}

std::string Mdp::pair_label(Index sa) const {
  const Index s = state_of_pair(sa);
  return "(" + states_[static_cast<std::size_t>(s)] + "," +
         actions_[static_cast<std::size_t>(s)][static_cast<std::size_t>(sa - pair_begin(s))] + ")";
}

Mdp Mdp::with_kernel(MatrixXd kernel) const {
  return Mdp(states_, actions_, rewards_, std::move(kernel), horizon_, discount_, terminal_);
}

Mdp Mdp::with_horizon(Horizon horizon) const {
  return Mdp(states_, actions_, rewards_, kernel_, horizon, discount_, terminal_);
}

std::vector<std::string> validate_mdp(const Mdp& m) {
  std::vector<std::string> out;
  if (m.num_states() == 0) out.emplace_back("model has no states");
  for (Index s = 0; s < m.num_states(); ++s)
    if (m.num_actions(s) == 0) out.push_back("state " + m.states()[static_cast<std::size_t>(s)] + " has no actions");

  if (m.kernel().cols() != m.num_states()) {
    std::ostringstream os;
    os << "kernel has " << m.kernel().cols() << " columns, expected " << m.num_states();
    out.push_back(os.str());
  } else {
    for (Index sa = 0; sa < m.num_pairs(); ++sa) {
      if (auto why = ProbVector::violation(m.kernel().row(sa).transpose())) {
        out.push_back(*why + " at " + m.pair_label(sa));
      }
    }
  }
  if (!m.rewards().allFinite()) out.emplace_back("rewards must be finite");

  const double gamma = m.discount();
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    std::ostringstream os;
    os << "discount " << gamma << " outside (0, 1]";
    out.push_back(os.str());
  }
  if (m.horizon().is_finite()) {
    if (m.horizon().steps() <= 0) out.emplace_back("finite horizon must be positive");
    if (m.terminal().size() != m.num_states())
      out.emplace_back("terminal rewards must have one entry per state");
    else if (!m.terminal().allFinite())
      out.emplace_back("terminal rewards must be finite");
  } else if (gamma >= 1.0) {
    out.emplace_back("discount must be < 1 for infinite horizon");
  }
  return out;
}

void require_valid(const Mdp& m) {
  const auto violations = validate_mdp(m);
  if (violations.empty()) return;
  std::string msg = "invalid MDP:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw InvalidInput(msg);
}

Policy Policy::stationary(VectorXd rule) { return Policy({std::move(rule)}, true); }

Policy Policy::time_varying(std::vector<VectorXd> rules) {
  if (rules.empty()) throw InvalidInput("time-varying policy needs at least one stage");
  return Policy(std::move(rules), false);
}

Policy Policy::deterministic(const Mdp& m, const std::vector<Index>& action) {
  if (static_cast<Index>(action.size()) != m.num_states()) throw InvalidInput("one action per state is required");
  VectorXd rule = VectorXd::Zero(m.num_pairs());
  for (Index s = 0; s < m.num_states(); ++s) {
    const Index a = action[static_cast<std::size_t>(s)];
    if (a < 0 || a >= m.num_actions(s)) throw InvalidInput("action index out of range");
    rule[m.pair(s, a)] = 1.0;
  }
  return stationary(std::move(rule));
}

Index Policy::action_at(const Mdp& m, Index t, Index s) const {
  Index best = 0;
  rule(t).segment(m.pair_begin(s), m.num_actions(s)).maxCoeff(&best);
  return best;
}

std::vector<std::string> policy_violations(const Mdp& m, const Policy& pi) {
  std::vector<std::string> out;
  if (m.horizon().is_finite()) {
    if (!pi.is_stationary() && pi.stages() != m.horizon().steps()) {
      std::ostringstream os;
      os << "policy has " << pi.stages() << " stages, horizon is " << m.horizon().steps();
      out.push_back(os.str());
      return out;
    }
  } else if (!pi.is_stationary()) {
    out.emplace_back("infinite-horizon evaluation requires a stationary policy");
    return out;
  }
  for (Index t = 0; t < pi.stages(); ++t) {
    const VectorXd& rule = pi.rule(t);
    if (rule.size() != m.num_pairs()) {
      out.emplace_back("decision rule size does not match the number of state-action pairs");
      continue;
    }
    for (Index s = 0; s < m.num_states(); ++s) {
      if (auto why = ProbVector::violation(rule.segment(m.pair_begin(s), m.num_actions(s)))) {
        std::ostringstream os;
        os << *why << " in decision rule at stage " << t << ", state " << m.states()[static_cast<std::size_t>(s)];
        out.push_back(os.str());
      }
    }
  }
  return out;
}

namespace {

void require_compatible(const Mdp& m, const Policy& pi) {
  const auto violations = policy_violations(m, pi);
  if (violations.empty()) return;
  std::string msg = "policy incompatible with model:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw InvalidInput(msg);
}

}  // namespace

ValueFunction evaluate_policy_finite(const Mdp& m, const Policy& pi) {
  require_valid(m);
  if (!m.horizon().is_finite()) throw InvalidInput("evaluate_policy_finite: model has an infinite horizon");
  require_compatible(m, pi);

  const int T = m.horizon().steps();
  const DenseModel<double> model(m);
  ValueFunction out;
  out.stages.resize(static_cast<std::size_t>(T) + 1);
  out.stages[static_cast<std::size_t>(T)] = m.terminal();
  for (int t = T - 1; t >= 0; --t) {
    const auto next = static_cast<std::size_t>(t) + 1;
    out.stages[next - 1] = model.average(pi.rule(t), model.backup(out.stages[next]));
  }
  return out;
}

ValueFunction evaluate_policy_infinite(const Mdp& m, const Policy& pi, double tol) {
  require_valid(m);
  if (m.horizon().is_finite()) throw InvalidInput("evaluate_policy_infinite: model has a finite horizon");
  if (!pi.is_stationary()) throw InvalidInput("evaluate_policy_infinite: policy is not stationary");
  if (!(tol > 0.0)) throw InvalidInput("evaluate_policy_infinite: tol must be positive");
  require_compatible(m, pi);
  return ValueFunction{true, {policy_fixed_point<double>(m, pi, tol).value}};
}

ValueFunction evaluate_policy(const Mdp& m, const Policy& pi, double tol) {
  return m.horizon().is_finite() ? evaluate_policy_finite(m, pi) : evaluate_policy_infinite(m, pi, tol);
}

}  // namespace privmdp
