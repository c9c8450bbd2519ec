#pragma once

#include "privmdp/mdp.hpp"
#include "privmdp/privacy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

namespace privmdp {

/// The set { beta P1 + (1 - beta) P2 : P1, P2 in simplex, ||P2 - pbar||_inf <= alpha }.
/// Never empty: pbar itself is a member.
template <typename Scalar>
class UncertaintySet {
 public:
  static UncertaintySet make(Vector<Scalar> pbar, Scalar alpha, Scalar beta) {
    if (pbar.size() == 0) throw InvalidInput("UncertaintySet: empty row");
    if (!(pbar.minCoeff() >= Scalar(0)) || std::abs(static_cast<double>(pbar.sum()) - 1.0) > tol::kSimplex)
      throw InvalidInput("UncertaintySet: pbar is not a probability vector");
    if (!(alpha >= Scalar(0)) || !std::isfinite(static_cast<double>(alpha)))
      throw InvalidInput("UncertaintySet: alpha must be finite and >= 0");
    if (!(beta >= Scalar(0) && beta < Scalar(1))) throw InvalidInput("UncertaintySet: beta must lie in [0, 1)");
    return UncertaintySet(std::move(pbar), alpha, beta);
  }
  static UncertaintySet make(const ProbVector& pbar, Scalar alpha, Scalar beta) {
    return make(pbar.vec().cast<Scalar>(), alpha, beta);
  }

  const Vector<Scalar>& pbar() const { return pbar_; }
  Scalar alpha() const { return alpha_; }
  Scalar beta() const { return beta_; }
  Index size() const { return pbar_.size(); }

 private:
  UncertaintySet(Vector<Scalar> pbar, Scalar alpha, Scalar beta) : pbar_(std::move(pbar)), alpha_(alpha), beta_(beta) {}
  Vector<Scalar> pbar_;
  Scalar alpha_;
  Scalar beta_;
};

template <typename Scalar>
struct Extremum {
  Scalar value;
  Vector<Scalar> witness;
};

/// Coordinates in the order the greedy fill visits them: ascending values for
/// Min, descending for Max, lowest index first on ties.
template <typename Derived>
std::vector<Index> fill_order(const Eigen::MatrixBase<Derived>& values, Direction direction) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  if (direction == Direction::Min)
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
  else
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] > values[b]; });
  return order;
}

namespace detail {

/// Extremum of values'p over the uncertainty set given the precomputed fill
/// order. The P1 component sits on the first coordinate of the order; P2
/// starts at its lower bounds and receives the remaining mass in fill order
/// up to its caps.
template <typename Scalar, typename DV, typename DP>
Scalar mixed_extremum(const Eigen::MatrixBase<DV>& values, const Eigen::MatrixBase<DP>& pbar, Scalar alpha,
                      Scalar beta, const std::vector<Index>& order, Vector<Scalar>* witness) {
  using std::max;
  using std::min;
  const Index n = pbar.size();
  Scalar budget(1);
  Scalar box_value(0);
  if (witness) witness->resize(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar lo = max(Scalar(pbar[i]) - alpha, Scalar(0));
    budget -= lo;
    box_value += lo * Scalar(values[i]);
    if (witness) (*witness)[i] = lo;
  }
  for (const Index i : order) {
    if (budget <= Scalar(0)) break;
    const Scalar lo = max(Scalar(pbar[i]) - alpha, Scalar(0));
    const Scalar hi = min(Scalar(pbar[i]) + alpha, Scalar(1));
    const Scalar add = min(hi - lo, budget);
    budget -= add;
    box_value += add * Scalar(values[i]);
    if (witness) (*witness)[i] += add;
  }
  const Index vertex = order.front();
  if (witness) {
    *witness *= (Scalar(1) - beta);
    (*witness)[vertex] += beta;
  }
  return beta * Scalar(values[vertex]) + (Scalar(1) - beta) * box_value;
}

}  // namespace detail

/// Exact extremum of values'p over p in the uncertainty set, with a witness.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Extremum<Scalar> inner_extremum(const Eigen::MatrixBase<Derived>& values, const UncertaintySet<Scalar>& u,
                                Direction direction) {
  if (values.size() != u.size()) throw InvalidInput("inner_extremum: dimension mismatch");
  Extremum<Scalar> out;
  out.value = detail::mixed_extremum<Scalar>(values, u.pbar(), u.alpha(), u.beta(), fill_order(values, direction),
                                             &out.witness);
  return out;
}

/// Whether p lies in the uncertainty set (up to `slack` per coordinate).
///
/// p is a member iff some P2 in simplex-and-box satisfies (1 - beta) P2 <= p;
/// then P1 = (p - (1 - beta) P2) / beta is a distribution. With beta = 0 the
/// set is the simplex intersected with the box.
template <typename Scalar>
bool is_member(const Vector<Scalar>& p, const UncertaintySet<Scalar>& u, double slack = 1e-9) {
  using std::abs;
  using std::max;
  using std::min;
  if (p.size() != u.size()) return false;
  const Scalar eps(slack);
  if (p.minCoeff() < -eps || abs(p.sum() - Scalar(1)) > eps) return false;
  const Scalar keep = Scalar(1) - u.beta();
  Scalar lo_sum(0), hi_sum(0);
  for (Index i = 0; i < p.size(); ++i) {
    const Scalar lo = max(u.pbar()[i] - u.alpha(), Scalar(0));
    Scalar hi = min(u.pbar()[i] + u.alpha(), Scalar(1));
    if (u.beta() > Scalar(0)) hi = min(hi, p[i] / keep);
    else if (abs(p[i] - u.pbar()[i]) > u.alpha() + eps) return false;
    if (lo > hi + eps) return false;
    lo_sum += lo;
    hi_sum += max(hi, lo);
  }
  return lo_sum <= Scalar(1) + eps && hi_sum >= Scalar(1) - eps;
}

/// One robust backup for a stationary decision rule:
///   (L v)(s) = sum_a rule(s,a) (r(s,a) + gamma * ext_{p in U(s,a)} p'v).
/// The extremum is evaluated for every pair, including zero-weight actions.
template <typename Scalar>
Vector<Scalar> robust_backup(const DenseModel<Scalar>& model, const Vector<Scalar>& rule, const Vector<Scalar>& v,
                             Scalar alpha, Scalar beta, Direction direction) {
  const auto order = fill_order(v, direction);
  Vector<Scalar> q(model.kernel.rows());
  for (Index sa = 0; sa < q.size(); ++sa) {
    q[sa] = model.rewards[sa] + model.discount * detail::mixed_extremum<Scalar>(v, model.kernel.row(sa), alpha, beta,
                                                                                 order, nullptr);
  }
  return model.average(rule, q);
}

/// Fixed point of the robust operator (Min: pessimistic, Max: optimistic),
/// iterated from zero until the successive gap is at most tol (1 - gamma) / gamma.
template <typename Scalar>
FixedPoint<Scalar> robust_fixed_point(const Mdp& mbar, const Policy& pi, Scalar alpha, Scalar beta, Direction direction,
                                      Scalar tol) {
  const DenseModel<Scalar> model(mbar);
  const Vector<Scalar> rule = pi.rule(0).cast<Scalar>();
  const Scalar gamma = model.discount;
  return iterate_to_fixed_point<Scalar>(
      [&](const Vector<Scalar>& v) { return robust_backup<Scalar>(model, rule, v, alpha, beta, direction); },
      mbar.num_states(), tol * (Scalar(1) - gamma) / gamma);
}

/// Pessimistic and optimistic value functions of a fixed policy.
struct BoundPair {
  ValueFunction pessimistic;
  ValueFunction optimistic;
  /// Iteration traces (infinite horizon only).
  ContractionTrace pessimistic_trace;
  ContractionTrace optimistic_trace;
};

BoundPair bounds_finite(const Mdp& mbar, const Policy& pi, UncertaintyParams params);
BoundPair bounds_finite(const Mdp& mbar, const Policy& pi, const PrivacyParams& params);

BoundPair bounds_infinite(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol);
BoundPair bounds_infinite(const Mdp& mbar, const Policy& pi, const PrivacyParams& params, double tol);

/// Dispatches on the horizon; `tol` is used for infinite horizons only.
BoundPair compute_bounds(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol);

/// optimistic(s0) - pessimistic(s0) at stage 0.
double cost_of_privacy(const BoundPair& bounds, Index s0);

/// Summary of one privatize / synthesize / bound run, evaluated at s0.
struct CopReport {
  double k = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  double v_private = 0.0;
  double v_pessimistic = 0.0;
  double v_optimistic = 0.0;
  double cop_bound = 0.0;
  /// Value of the private policy under the true kernel, when known.
  std::optional<double> v_nonprivate;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  double t_privatize_ms = 0.0;
  double t_synth_ms = 0.0;
  double t_bounds_ms = 0.0;
};

}  // namespace privmdp
