#pragma once

#include "privmdp/mdp.hpp"
#include "privmdp/prob_vector.hpp"
#include "privmdp/rng.hpp"

#include <cmath>

namespace privmdp {

/// Concentration radius of the Dirichlet mechanism: with probability at
/// least 1 - beta, ||M(p) - p||_inf < sqrt(log(1/beta) / (2 (k + 1))).
template <typename Scalar = double>
Scalar alpha_bound(Scalar k, Scalar beta) {
  if (!(k > 0) || !std::isfinite(static_cast<double>(k))) throw InvalidInput("alpha_bound: k must be positive");
  if (!(beta > 0 && beta <= 1)) throw InvalidInput("alpha_bound: beta must lie in (0, 1]");
  using std::log;
  using std::sqrt;
  return sqrt(log(Scalar(1) / beta) / (Scalar(2) * (k + Scalar(1))));
}

/// Radius and mixing weight of the uncertainty set around a privatized row.
struct UncertaintyParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Dirichlet scale k with the tail probability beta and its radius alpha.
struct PrivacyParams {
  double k;
  double beta;
  double alpha;

  static PrivacyParams make(double k, double beta);
  UncertaintyParams uncertainty() const { return {alpha, beta}; }
};

/// log of a Gamma(shape, 1) variate (Marsaglia-Tsang; shape < 1 through the
/// Gamma(shape + 1) * U^(1/shape) boost, applied in log space).
double sample_log_gamma(double shape, RngStream& rng);

/// One draw of the Dirichlet mechanism: Dirichlet(k p). `p` must be interior.
ProbVector dirichlet_sample(const ProbVector& p, double k, RngStream& rng);

/// Dirichlet(k p) restricted to the face spanned by the positive entries of
/// `p`; zero entries stay zero.
ProbVector dirichlet_sample_on_support(const ProbVector& p, double k, RngStream& rng);

struct PrivatizeOptions {
  /// Privatize each row over its support instead of rejecting rows with
  /// structural zeros.
  bool restrict_to_support = false;
};

/// An Mdp whose kernel was produced by privatize_kernel(). Synthesis and
/// bound computations in the pipeline only ever see this type, never the
/// original kernel.
class PrivatizedMdp {
 public:
  const Mdp& model() const { return model_; }
  double k() const { return k_; }
  const RngStream& stream() const { return stream_; }

 private:
  friend PrivatizedMdp privatize_kernel(const Mdp&, double, const RngStream&, PrivatizeOptions);
  PrivatizedMdp(Mdp model, double k, RngStream stream) : model_(std::move(model)), k_(k), stream_(std::move(stream)) {}

  Mdp model_;
  double k_;
  RngStream stream_;
};

/// Replaces every kernel row P(s,a) by an independent Dirichlet mechanism
/// draw. Row (s,a) uses stream id (base.trial, s, a), so results do not
/// depend on evaluation order.
PrivatizedMdp privatize_kernel(const Mdp& m, double k, const RngStream& base, PrivatizeOptions options = {});

/// A random b-adjacent neighbour of `p`: differs in exactly two coordinates,
/// ||p - q||_1 <= b, and stays interior.
ProbVector adjacent_pair(const ProbVector& p, double b, RngStream& rng);

/// Whether p and q differ in exactly two coordinates with ||p - q||_1 <= b.
bool is_b_adjacent(const ProbVector& p, const ProbVector& q, double b);

}  // namespace privmdp
