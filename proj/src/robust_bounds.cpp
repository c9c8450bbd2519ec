#include "privmdp/robust_bounds.hpp"

#include <sstream>

namespace privmdp {

namespace {

void check_params(UncertaintyParams params) {
  if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha)) throw InvalidInput("bounds: alpha must be finite and >= 0");
  if (!(params.beta >= 0.0 && params.beta < 1.0)) throw InvalidInput("bounds: beta must lie in [0, 1)");
}

void check_policy(const Mdp& mbar, const Policy& pi) {
  const auto violations = policy_violations(mbar, pi);
  if (violations.empty()) return;
  std::string msg = "bounds: policy incompatible with model:";
  for (const auto& v : violations) msg += "\n  " + v;
  throw InvalidInput(msg);
}

}  // namespace

BoundPair bounds_finite(const Mdp& mbar, const Policy& pi, UncertaintyParams params) {
  require_valid(mbar);
  if (!mbar.horizon().is_finite()) throw InvalidInput("bounds_finite: model has an infinite horizon");
  check_params(params);
  check_policy(mbar, pi);

  const auto T = static_cast<std::size_t>(mbar.horizon().steps());
  const DenseModel<double> model(mbar);
  BoundPair out;
  out.pessimistic = ValueFunction{false, std::vector<VectorXd>(T + 1)};
  out.optimistic = ValueFunction{false, std::vector<VectorXd>(T + 1)};
  out.pessimistic.stages[T] = mbar.terminal();
  out.optimistic.stages[T] = mbar.terminal();
  for (std::size_t t = T; t-- > 0;) {
    const VectorXd& rule = pi.rule(static_cast<Index>(t));
    out.pessimistic.stages[t] =
        robust_backup<double>(model, rule, out.pessimistic.stages[t + 1], params.alpha, params.beta, Direction::Min);
    out.optimistic.stages[t] =
        robust_backup<double>(model, rule, out.optimistic.stages[t + 1], params.alpha, params.beta, Direction::Max);
  }
  return out;
}

BoundPair bounds_finite(const Mdp& mbar, const Policy& pi, const PrivacyParams& params) {
  return bounds_finite(mbar, pi, params.uncertainty());
}

BoundPair bounds_infinite(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol) {
  require_valid(mbar);
  if (mbar.horizon().is_finite()) throw InvalidInput("bounds_infinite: model has a finite horizon");
  if (!pi.is_stationary()) throw InvalidInput("bounds_infinite: policy is not stationary");
  if (!(tol > 0.0)) throw InvalidInput("bounds_infinite: tol must be positive");
  check_params(params);
  check_policy(mbar, pi);

  auto lower = robust_fixed_point<double>(mbar, pi, params.alpha, params.beta, Direction::Min, tol);
  auto upper = robust_fixed_point<double>(mbar, pi, params.alpha, params.beta, Direction::Max, tol);
  BoundPair out;
  out.pessimistic = ValueFunction{true, {std::move(lower.value)}};
  out.optimistic = ValueFunction{true, {std::move(upper.value)}};
  out.pessimistic_trace = std::move(lower.trace);
  out.optimistic_trace = std::move(upper.trace);
  return out;
}

BoundPair bounds_infinite(const Mdp& mbar, const Policy& pi, const PrivacyParams& params, double tol) {
  return bounds_infinite(mbar, pi, params.uncertainty(), tol);
}

BoundPair compute_bounds(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol) {
  return mbar.horizon().is_finite() ? bounds_finite(mbar, pi, params) : bounds_infinite(mbar, pi, params, tol);
}

double cost_of_privacy(const BoundPair& bounds, Index s0) {
  const VectorXd& lo = bounds.pessimistic.initial();
  const VectorXd& hi = bounds.optimistic.initial();
  if (s0 < 0 || s0 >= lo.size() || s0 >= hi.size()) {
    std::ostringstream os;
    os << "cost_of_privacy: unknown state index " << s0;
    throw InvalidInput(os.str());
  }
  const double gap = hi[s0] - lo[s0];
  // Both extrema coincide up to rounding when the set is a single point.
  if (gap < -1e-9 * std::max(1.0, std::abs(hi[s0]))) throw std::logic_error("cost_of_privacy: optimistic < pessimistic");
  return std::max(gap, 0.0);
}

}  // namespace privmdp
