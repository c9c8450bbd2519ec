#include "privmdp/privacy.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace privmdp {

PrivacyParams PrivacyParams::make(double k, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidInput("PrivacyParams: beta must lie in (0, 1)");
  return {k, beta, alpha_bound(k, beta)};
}

double sample_log_gamma(double shape, RngStream& rng) {
  if (!(shape > 0.0) || !std::isfinite(shape)) throw InvalidInput("sample_log_gamma: shape must be positive");
  if (shape < 1.0) {
    return sample_log_gamma(shape + 1.0, rng) + std::log(rng.uniform()) / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

namespace {

// Normalizes exp(logs) without overflow or total underflow.
VectorXd normalize_log_weights(const VectorXd& logs) {
  const double top = logs.maxCoeff();
  VectorXd w = (logs.array() - top).exp().matrix();
  return w / w.sum();
}

void check_scale(double k) {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("Dirichlet mechanism: k must be positive and finite");
}

}  // namespace

ProbVector dirichlet_sample(const ProbVector& p, double k, RngStream& rng) {
  check_scale(k);
  if (!p.is_interior()) throw InvalidInput("dirichlet_sample: input must lie in the interior of the simplex");
  if (p.size() == 1) return p;
  VectorXd logs(p.size());
  for (Index i = 0; i < p.size(); ++i) logs[i] = sample_log_gamma(k * p[i], rng);
  return ProbVector::from(normalize_log_weights(logs));
}

ProbVector dirichlet_sample_on_support(const ProbVector& p, double k, RngStream& rng) {
  check_scale(k);
  std::vector<Index> support;
  for (Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) support.push_back(i);
  if (support.size() == 1) return ProbVector::point_mass(p.size(), support.front());

  VectorXd logs(static_cast<Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j)
    logs[static_cast<Index>(j)] = sample_log_gamma(k * p[support[j]], rng);
  const VectorXd w = normalize_log_weights(logs);
  VectorXd out = VectorXd::Zero(p.size());
  for (std::size_t j = 0; j < support.size(); ++j) out[support[j]] = w[static_cast<Index>(j)];
  return ProbVector::from(std::move(out));
}

PrivatizedMdp privatize_kernel(const Mdp& m, double k, const RngStream& base, PrivatizeOptions options) {
  check_scale(k);
  require_valid(m);
  if (!options.restrict_to_support) {
    std::string offending;
    for (Index sa = 0; sa < m.num_pairs(); ++sa) {
      if (m.kernel().row(sa).minCoeff() <= 0.0) offending += " " + m.pair_label(sa);
    }
    if (!offending.empty())
      throw InvalidInput("privatize_kernel: rows outside the simplex interior at" + offending);
  }

  MatrixXd kernel(m.num_pairs(), m.num_states());
  for (Index s = 0; s < m.num_states(); ++s) {
    for (Index a = 0; a < m.num_actions(s); ++a) {
      const Index sa = m.pair(s, a);
      RngStream rng = base.substream(StreamId{base.id().trial, static_cast<std::uint64_t>(s),
                                              static_cast<std::uint64_t>(a), domain::kPrivatize});
      const ProbVector row = ProbVector::from(m.kernel().row(sa).transpose());
      const ProbVector draw =
          options.restrict_to_support ? dirichlet_sample_on_support(row, k, rng) : dirichlet_sample(row, k, rng);
      kernel.row(sa) = draw.vec().transpose();
    }
  }
  return PrivatizedMdp(m.with_kernel(std::move(kernel)), k, base);
}

ProbVector adjacent_pair(const ProbVector& p, double b, RngStream& rng) {
  const Index n = p.size();
  if (n < 2) throw InvalidInput("adjacent_pair: need at least two coordinates");
  if (!(b > 0.0 && b <= 1.0)) throw InvalidInput("adjacent_pair: b must lie in (0, 1]");
  if (!p.is_interior()) throw InvalidInput("adjacent_pair: input must be interior");

  const auto pick = [&](Index bound) {
    return static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(bound));
  };
  const Index i = pick(n);
  Index j = pick(n - 1);
  if (j >= i) ++j;

  // q_i = p_i + delta, q_j = p_j - delta; |delta| <= b/2 keeps ||p - q||_1 <= b.
  const double lo = std::max(-p[i], -0.5 * b);
  const double hi = std::min(p[j], 0.5 * b);
  double delta = 0.0;
  while (delta == 0.0 || p[i] + delta <= 0.0 || p[j] - delta <= 0.0) delta = lo + rng.uniform() * (hi - lo);
  VectorXd q = p.vec();
  q[i] += delta;
  q[j] -= delta;
  return ProbVector::exact(std::move(q));
}

bool is_b_adjacent(const ProbVector& p, const ProbVector& q, double b) {
  if (p.size() != q.size()) return false;
  const VectorXd diff = p.vec() - q.vec();
  Index changed = 0;
  for (Index i = 0; i < diff.size(); ++i) changed += diff[i] != 0.0;
  return changed == 2 && diff.lpNorm<1>() <= b + 1e-15;
}

}  // namespace privmdp
