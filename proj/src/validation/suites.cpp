#include "privmdp/validation/suites.hpp"

#include "privmdp/experiments.hpp"
#include "privmdp/lp.hpp"
#include "privmdp/mdp_io.hpp"
#include "privmdp/privacy.hpp"
#include "privmdp/robust_bounds.hpp"
#include "privmdp/synthesis.hpp"
#include "privmdp/validation/oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <ostream>

namespace privmdp::validation {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

template <typename... Args>
std::string format(const char* pattern, Args... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, pattern, args...);
  return buffer;
}

struct Outcome {
  bool passed = true;
  std::string detail;

  /// Records the first failure message; later ones are dropped.
  void fail(std::string why) {
    if (passed) detail = std::move(why);
    passed = false;
  }
};

class Draws {
 public:
  Draws(std::uint64_t seed, std::uint64_t stream) : rng_(seed, StreamId{stream, 0, 0, domain::kTest}) {}

  double uniform() { return rng_.uniform(); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  Index integer(Index lo, Index hi) {
    return std::min(hi, lo + static_cast<Index>(rng_.uniform() * static_cast<double>(hi - lo + 1)));
  }
  bool chance(double p) { return rng_.uniform() < p; }

  /// Flat Dirichlet draw.
  VectorXd simplex(Index n) {
    VectorXd w(n);
    for (Index i = 0; i < n; ++i) w[i] = -std::log(rng_.uniform());
    return w / w.sum();
  }

  RngStream& stream() { return rng_; }

 private:
  RngStream rng_;
};

/// Random model with 1..max_actions actions per state and entries >= floor.
/// horizon 0 means infinite.
Mdp random_model(Draws& d, Index states, Index max_actions, int horizon, double discount, double floor = 1e-6) {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> actions;
  Index pairs = 0;
  for (Index s = 0; s < states; ++s) {
    names.push_back("s" + std::to_string(s));
    std::vector<std::string> list;
    const Index count = d.integer(1, max_actions);
    for (Index a = 0; a < count; ++a) list.push_back("a" + std::to_string(a));
    pairs += count;
    actions.push_back(std::move(list));
  }
  MatrixXd kernel(pairs, states);
  VectorXd rewards(pairs);
  for (Index sa = 0; sa < pairs; ++sa) {
    kernel.row(sa) = ((1.0 - floor * static_cast<double>(states)) * d.simplex(states).array() + floor).matrix();
    rewards[sa] = d.uniform(-1.0, 1.0);
  }
  VectorXd terminal = VectorXd::Zero(states);
  if (horizon > 0)
    for (Index s = 0; s < states; ++s) terminal[s] = d.uniform(-1.0, 1.0);
  return Mdp(std::move(names), std::move(actions), std::move(rewards), std::move(kernel),
             horizon > 0 ? Horizon::finite(horizon) : Horizon::infinite(), discount, std::move(terminal));
}

VectorXd random_rule(const Mdp& m, Draws& d) {
  VectorXd rule = VectorXd::Zero(m.num_pairs());
  for (Index s = 0; s < m.num_states(); ++s) {
    const Index n = m.num_actions(s);
    if (d.chance(0.4))
      rule[m.pair(s, d.integer(0, n - 1))] = 1.0;
    else
      rule.segment(m.pair_begin(s), n) = d.simplex(n);
  }
  return rule;
}

/// Time-varying for finite horizons, stationary otherwise.
Policy random_policy(const Mdp& m, Draws& d) {
  if (!m.horizon().is_finite()) return Policy::stationary(random_rule(m, d));
  std::vector<VectorXd> rules;
  for (int t = 0; t < m.horizon().steps(); ++t) rules.push_back(random_rule(m, d));
  return Policy::time_varying(std::move(rules));
}

/// One privatized model with its private policy and value.
struct PrivateInstance {
  std::string label;
  Mdp mbar;
  Policy policy;
  ValueFunction value;
  UncertaintyParams params;
};

PrivateInstance make_private(std::string label, const Mdp& truth, double k, double beta, const RngStream& stream,
                             PrivatizeOptions options = {}) {
  PipelineResult run = run_pipeline(truth, k, stream, 1e-10, options);
  return {std::move(label), run.privatized.model(), run.synthesis.policy, run.synthesis.value,
          PrivacyParams::make(k, beta).uncertainty()};
}

/// Random finite-horizon instances (|S| <= 6, T <= 5) plus both examples.
std::vector<PrivateInstance> finite_instances(const SuiteOptions& o) {
  std::vector<PrivateInstance> out;
  const int count = o.quick ? 25 : 100;
  const double betas[] = {0.01, 0.05, 0.2};
  const double discounts[] = {1.0, 0.95, 0.7};
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 1000 + static_cast<std::uint64_t>(i));
    const Mdp truth = random_model(d, d.integer(2, 6), 4, static_cast<int>(d.integer(1, 5)), discounts[i % 3]);
    const double k = std::exp(d.uniform(0.0, std::log(1000.0)));
    out.push_back(make_private("random#" + std::to_string(i), truth, k, betas[i % 3],
                               RngStream(o.seed, StreamId{static_cast<std::uint64_t>(i)})));
  }
  const Mdp example1 = build_example1();
  const Mdp example2 = build_example2(2024);
  for (double k : default_k_grid()) {
    for (std::uint64_t trial = 0; trial < 3; ++trial) {
      out.push_back(make_private(format("example1 k=%g trial=%d", k, static_cast<int>(trial)), example1, k, 0.05,
                                 RngStream(o.seed, StreamId{trial}), PrivatizeOptions{true}));
    }
    out.push_back(make_private(format("example2 k=%g", k), example2, k, 0.05, RngStream(o.seed, StreamId{0})));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Acceptance criteria

Outcome criterion_inner_exactness(const SuiteOptions& o) {
  Outcome out;
  const auto start = Clock::now();
  const int count = 1000;
  double worst = 0.0;
  int mismatches = 0;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 2000 + static_cast<std::uint64_t>(i));
    const Index n = d.integer(2, 8);
    VectorXd values(n);
    for (Index j = 0; j < n; ++j) values[j] = d.uniform(-2.0, 2.0);
    if (d.chance(0.3)) values = (values * 2.0).array().round().matrix() / 2.0;  // ties
    VectorXd pbar = d.simplex(n);
    if (d.chance(0.3)) {
      for (Index j = 0; j < n; ++j)
        if (d.chance(0.4)) pbar[j] = 0.0;
      if (pbar.sum() == 0.0) pbar[0] = 1.0;
      pbar /= pbar.sum();
    }
    const double alpha = d.chance(0.1) ? 0.0 : d.uniform(0.0, 0.6);
    const double beta = d.chance(0.1) ? 0.0 : (d.chance(0.05) ? 0.999 : d.uniform(0.0, 0.95));
    const Direction dir = i % 2 == 0 ? Direction::Min : Direction::Max;

    const auto u = UncertaintySet<double>::make(pbar, alpha, beta);
    const double structured = inner_extremum(values, u, dir).value;
    const LpSolution lp = solve_lp(build_inner_lp(values, ProbVector::from(pbar), alpha, beta, dir));
    if (lp.status != LpStatus::Optimal) {
      ++mismatches;
      out.fail(format("instance %d: LP not optimal", i));
      continue;
    }
    const double reference = dir == Direction::Min ? lp.objective_value : -lp.objective_value;
    const double diff = std::abs(structured - reference);
    worst = std::max(worst, diff);
    if (diff > 1e-9) {
      ++mismatches;
      out.fail(format("instance %d (n=%d): structured %.17g vs LP %.17g", i, static_cast<int>(n), structured,
                      reference));
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 5.0) out.fail(format("took %.2f s (limit 5 s)", elapsed));
  const std::string summary =
      format("%d instances, %d mismatches, max |diff| %.3g, %.2f s", count, mismatches, worst, elapsed);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_sandwich(const SuiteOptions& o) {
  Outcome out;
  int violations = 0, checked = 0;
  double worst = 0.0;
  for (const auto& inst : finite_instances(o)) {
    const BoundPair b = bounds_finite(inst.mbar, inst.policy, inst.params);
    for (Index t = 0; t < static_cast<Index>(inst.value.stages.size()); ++t) {
      const VectorXd low = b.pessimistic.at(t) - inst.value.at(t);
      const VectorXd high = inst.value.at(t) - b.optimistic.at(t);
      for (Index s = 0; s < low.size(); ++s) {
        ++checked;
        const double excess = std::max(low[s], high[s]);
        worst = std::max(worst, excess);
        if (excess > 1e-9) {
          ++violations;
          out.fail(format("%s: t=%d s=%d pess %.17g private %.17g opt %.17g", inst.label.c_str(), static_cast<int>(t),
                          static_cast<int>(s), b.pessimistic.at(t)[s], inst.value.at(t)[s], b.optimistic.at(t)[s]));
        }
      }
    }
  }
  const std::string summary =
      format("%d (t,s) cells, %d violations, max excess %.3g", checked, violations, std::max(worst, 0.0));
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_collapse(const SuiteOptions& o) {
  Outcome out;
  double worst = 0.0;
  int instances = 0;
  auto check = [&](const std::string& label, const BoundPair& b) {
    ++instances;
    for (Index s = 0; s < static_cast<Index>(b.pessimistic.initial().size()); ++s) {
      const double cop = cost_of_privacy(b, s);
      worst = std::max(worst, cop);
      if (cop > 1e-9) out.fail(format("%s: cop %.3g at s=%d", label.c_str(), cop, static_cast<int>(s)));
    }
  };
  for (const auto& inst : finite_instances(o)) check(inst.label, bounds_finite(inst.mbar, inst.policy, UncertaintyParams{0.0, 0.0}));
  const double discounts[] = {0.5, 0.9, 0.99};
  for (int i = 0; i < (o.quick ? 6 : 20); ++i) {
    Draws d(o.seed, 3000 + static_cast<std::uint64_t>(i));
    const Mdp m = random_model(d, d.integer(2, 6), 3, 0, discounts[i % 3]);
    check(format("infinite#%d", i), bounds_infinite(m, random_policy(m, d), UncertaintyParams{0.0, 0.0}, 1e-8));
  }
  const std::string summary = format("%d instances, max cop %.3g", instances, worst);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_concentration(const SuiteOptions& o) {
  Outcome out;
  const auto start = Clock::now();
  const double ks[] = {1.0, 5.0, 20.0, 100.0};
  const double betas[] = {0.01, 0.05, 0.2};
  const Index dims[] = {3, 10};
  const int draws = o.quick ? 10'000 : 100'000;
  int cells = 0, failing = 0;
  double worst_ratio = 0.0;
  std::string worst_cell;
  for (std::size_t ki = 0; ki < 4; ++ki) {
    for (const Index n : dims) {
      for (int pi = 0; pi < 5; ++pi) {
        Draws d(o.seed, 4000 + 100 * ki + 10 * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(pi));
        const ProbVector p = smooth(ProbVector::from(d.simplex(n)), 1e-3);
        int tails[3] = {0, 0, 0};
        double radius[3];
        for (int b = 0; b < 3; ++b) radius[b] = alpha_bound(ks[ki], betas[b]);
        for (int i = 0; i < draws; ++i) {
          const double dev = (dirichlet_sample(p, ks[ki], d.stream()).vec() - p.vec()).cwiseAbs().maxCoeff();
          for (int b = 0; b < 3; ++b) tails[b] += dev >= radius[b] ? 1 : 0;
        }
        for (int b = 0; b < 3; ++b) {
          ++cells;
          const double freq = static_cast<double>(tails[b]) / draws;
          if (freq / betas[b] > worst_ratio) {
            worst_ratio = freq / betas[b];
            worst_cell = format("k=%g beta=%g n=%d p#%d freq=%.4f", ks[ki], betas[b], static_cast<int>(n), pi, freq);
          }
          if (freq > betas[b]) {
            ++failing;
            out.fail(format("k=%g beta=%g n=%d p#%d: tail frequency %.4f > beta", ks[ki], betas[b],
                            static_cast<int>(n), pi, freq));
          }
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) out.fail(format("took %.1f s (limit 60 s)", elapsed));
  const std::string summary = format("%d/%d cells above beta; worst %s; %d draws each, %.1f s", failing, cells,
                                     worst_cell.c_str(), draws, elapsed);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_moments(const SuiteOptions& o) {
  Outcome out;
  const int draws = 100'000;
  const double ks[] = {2.0, 9.0, 50.0};
  std::vector<ProbVector> ps{ProbVector::from(VectorXd::Constant(2, 0.5)),
                             ProbVector::from((VectorXd(3) << 0.2, 0.3, 0.5).finished())};
  Draws pick(o.seed, 5000);
  ps.push_back(smooth(ProbVector::from(pick.simplex(4)), 0.4));
  double worst_mean = 0.0, worst_var = 0.0;
  for (std::size_t ki = 0; ki < 3; ++ki) {
    const double k = ks[ki];
    for (std::size_t pi = 0; pi < ps.size(); ++pi) {
      const ProbVector& p = ps[pi];
      Draws d(o.seed, 5100 + 10 * ki + pi);
      VectorXd sum = VectorXd::Zero(p.size()), sum_sq = VectorXd::Zero(p.size());
      for (int i = 0; i < draws; ++i) {
        const VectorXd x = dirichlet_sample(p, k, d.stream()).vec();
        sum += x;
        sum_sq += x.cwiseProduct(x);
      }
      const VectorXd mean = sum / draws;
      const VectorXd var = (sum_sq / draws - mean.cwiseProduct(mean)) * (draws / (draws - 1.0));
      for (Index i = 0; i < p.size(); ++i) {
        const double expected_var = p[i] * (1.0 - p[i]) / (k + 1.0);
        const double z = std::abs(mean[i] - p[i]) / std::sqrt(expected_var / draws);
        const double rel = std::abs(var[i] - expected_var) / expected_var;
        worst_mean = std::max(worst_mean, z);
        worst_var = std::max(worst_var, rel);
        if (z > 4.0) out.fail(format("k=%g p#%d coord %d: mean off by %.2f standard errors", k, static_cast<int>(pi),
                                     static_cast<int>(i), z));
        if (rel > 0.05) out.fail(format("k=%g p#%d coord %d: variance %.5g vs %.5g", k, static_cast<int>(pi),
                                        static_cast<int>(i), var[i], expected_var));
      }
    }
  }
  const std::string summary =
      format("worst mean deviation %.2f se, worst variance error %.2f%%", worst_mean, 100.0 * worst_var);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_trend(const SuiteOptions& o) {
  Outcome out;
  const auto start = Clock::now();
  std::string summary;
  for (const char* source : {"builtin:example1", "builtin:example2"}) {
    SweepConfig cfg;
    cfg.source = source;
    cfg.trials = o.quick ? 20 : 50;
    cfg.seed = o.seed;
    const auto stats = summarize(run_sweep(cfg));
    summary += std::string(source + 8) + " cop:";
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const SweepStats& st = stats[i];
      summary += format(" %.4g", st.mean_cop);
      if (i > 0 && !(st.mean_cop < stats[i - 1].mean_cop))
        out.fail(format("%s: mean cop not decreasing at k=%g (%.6g after %.6g)", source, st.k, st.mean_cop,
                        stats[i - 1].mean_cop));
      const double lo = st.mean_pess - 2.0 * st.se_pess, hi = st.mean_opt + 2.0 * st.se_opt;
      if (st.mean_nonprivate < lo || st.mean_nonprivate > hi)
        out.fail(format("%s: k=%g mean v_nonprivate %.6g outside [%.6g, %.6g]", source, st.k, st.mean_nonprivate, lo,
                        hi));
    }
    summary += "; ";
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 600.0) out.fail(format("took %.0f s (limit 600 s)", elapsed));
  summary += format("%.1f s", elapsed);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_contraction(const SuiteOptions& o) {
  using LD = long double;
  Outcome out;
  const double discounts[] = {0.5, 0.9, 0.99};
  double worst_excess = -1.0;
  int audited = 0, ratios = 0;
  for (int i = 0; i < (o.quick ? 15 : 50); ++i) {
    Draws d(o.seed, 7000 + static_cast<std::uint64_t>(i));
    const double gamma = discounts[i % 3];
    const Mdp mbar = random_model(d, d.integer(2, 8), 3, 0, gamma);
    const Policy pi = d.chance(0.5) ? synthesize_infinite(mbar, 1e-8).policy : random_policy(mbar, d);
    const double k = std::exp(d.uniform(0.0, std::log(1000.0)));
    const UncertaintyParams params = PrivacyParams::make(k, 0.05).uncertainty();
    const double v_max = mbar.rewards().cwiseAbs().maxCoeff() / (1.0 - gamma);
    // Loose enough that long double roundoff stays far below the 1e-9 slack
    // even at the last (smallest) gap.
    const double tol = 1e-6 * std::max(1.0, v_max / (1.0 - gamma));
    const auto bound =
        static_cast<int>(std::ceil(std::log(2.0 * v_max / (tol * (1.0 - gamma))) / std::log(1.0 / gamma)));

    const FixedPoint<LD> runs[] = {
        robust_fixed_point<LD>(mbar, pi, params.alpha, params.beta, Direction::Min, tol),
        robust_fixed_point<LD>(mbar, pi, params.alpha, params.beta, Direction::Max, tol),
        policy_fixed_point<LD>(mbar, pi, tol)};
    const char* names[] = {"pessimistic", "optimistic", "nominal"};
    for (int r = 0; r < 3; ++r) {
      ++audited;
      const ContractionTrace& trace = runs[r].trace;
      if (trace.iterations > bound)
        out.fail(format("instance %d %s: %d iterations > bound %d", i, names[r], trace.iterations, bound));
      for (std::size_t j = 1; j < trace.gaps.size(); ++j) {
        if (trace.gaps[j - 1] == 0.0) continue;
        ++ratios;
        const double excess = trace.gaps[j] / trace.gaps[j - 1] - gamma;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-9)
          out.fail(format("instance %d %s: gap ratio %.12g > gamma %.2f at step %d", i, names[r],
                          trace.gaps[j] / trace.gaps[j - 1], gamma, static_cast<int>(j)));
      }
    }
  }
  const std::string summary =
      format("%d iterations audited over %d runs; max (ratio - gamma) %.3g", ratios, audited, worst_excess);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_runtime_scaling(const SuiteOptions& o) {
  Outcome out;
  SweepConfig cfg;
  cfg.source = "builtin:example2";
  cfg.seed = o.seed;
  std::string summary;
  for (const ScalingEntry& e : runtime_probe(cfg, 5)) {
    summary += format("%s: %.3f -> %.3f ms (x%.2f); ", e.label.c_str(), e.base_ms, e.scaled_ms, e.ratio);
    const bool gated = e.label == "horizon x2" || e.label == "actions x2";
    if (gated && !(e.ratio >= 1.5 && e.ratio <= 3.0))
      out.fail(format("%s ratio %.3f outside [1.5, 3.0]", e.label.c_str(), e.ratio));
  }
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

Outcome criterion_oracles(const SuiteOptions& o) {
  Outcome out;
  double worst_synth = 0.0, worst_grid = 0.0;
  const int count = o.quick ? 15 : 50;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 9000 + static_cast<std::uint64_t>(i));
    const Mdp m = random_model(d, d.integer(1, 4), 3, static_cast<int>(d.integer(1, 3)), d.chance(0.5) ? 1.0 : 0.9);
    const VectorXd reference = oracle::best_deterministic_value(m);
    const double diff = (synthesize_finite(m).value.initial() - reference).cwiseAbs().maxCoeff();
    worst_synth = std::max(worst_synth, diff);
    if (diff > 1e-9) out.fail(format("synthesis instance %d off by %.3g", i, diff));
  }
  const int grids = o.quick ? 4 : 12;
  for (int i = 0; i < grids; ++i) {
    Draws d(o.seed, 9500 + static_cast<std::uint64_t>(i));
    const Mdp m = random_model(d, 2, 3, 2, d.chance(0.5) ? 1.0 : 0.9, 0.0);
    const Policy pi = random_policy(m, d);
    const double alpha = d.uniform(0.0, 0.5), beta = d.uniform(0.0, 0.5);
    const BoundPair b = bounds_finite(m, pi, UncertaintyParams{alpha, beta});
    const oracle::GridBounds g = oracle::grid_search_bounds(m, pi, alpha, beta, 1e-3);
    const double diff = std::max((b.pessimistic.initial() - g.lower).cwiseAbs().maxCoeff(),
                                 (b.optimistic.initial() - g.upper).cwiseAbs().maxCoeff());
    worst_grid = std::max(worst_grid, diff);
    if (diff > 2e-3) out.fail(format("grid instance %d off by %.3g", i, diff));
  }
  const std::string summary = format("%d enumeration instances (max diff %.3g), %d grid instances (max diff %.3g)",
                                     count, worst_synth, grids, worst_grid);
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

/// Restores an environment variable on scope exit.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value, 1);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }
  ScopedEnv(const ScopedEnv&) = delete;
  ScopedEnv& operator=(const ScopedEnv&) = delete;

 private:
  const char* name_;
  std::optional<std::string> old_;
};

Outcome criterion_determinism(const SuiteOptions& o) {
  Outcome out;
  std::string summary;
  for (const char* source : {"builtin:example1", "builtin:example2"}) {
    SweepConfig cfg;
    cfg.source = source;
    cfg.seed = o.seed;
    cfg.trials = o.quick ? 8 : 50;
    cfg.threads = 1;
    const std::string serial = sweep_csv(run_sweep(cfg), false);
    cfg.threads = 4;
    const std::string parallel = sweep_csv(run_sweep(cfg), false);
    cfg.threads = 0;
    std::string from_env;
    {
      ScopedEnv env("PRIVMDP_THREADS", "3");
      from_env = sweep_csv(run_sweep(cfg), false);
    }
    const std::string again = sweep_csv(run_sweep(cfg), false);
    if (serial != parallel) out.fail(std::string(source) + ": 1 vs 4 threads differ");
    if (serial != from_env) out.fail(std::string(source) + ": PRIVMDP_THREADS=3 differs");
    if (serial != again) out.fail(std::string(source) + ": repeated run differs");
    summary += format("%s %d bytes; ", source + 8, static_cast<int>(serial.size()));
  }
  summary += "threads 1/4/env=3/default compared";
  out.detail = out.passed ? summary : out.detail + "; " + summary;
  return out;
}

// ---------------------------------------------------------------------------
// Module invariants

Outcome invariant_evaluation(const SuiteOptions& o) {
  Outcome out;
  const Mdp ex1 = build_example1();
  const double v = evaluate_policy_finite(ex1, Policy::deterministic(ex1, {0, 0, 0})).initial()[0];
  if (std::abs(v - 0.9) > 1e-12) out.fail(format("example1 startup1 value %.17g", v));

  const int count = o.quick ? 10 : 40;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 10'000 + static_cast<std::uint64_t>(i));
    const Mdp m = random_model(d, d.integer(1, 3), 2, static_cast<int>(d.integer(1, 3)), d.chance(0.5) ? 1.0 : 0.8);
    const Policy pi = random_policy(m, d);
    const ValueFunction vf = evaluate_policy_finite(m, pi);
    if (vf.stages.back() != m.terminal()) out.fail(format("finite #%d: stage T differs from terminal rewards", i));
    const double diff = (vf.initial() - oracle::trajectory_expectation(m, pi)).cwiseAbs().maxCoeff();
    if (diff > 1e-12) out.fail(format("finite #%d: trajectory oracle off by %.3g", i, diff));
  }

  const double discounts[] = {0.001, 0.5, 0.9, 0.99};
  const double tol = 1e-8;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 11'000 + static_cast<std::uint64_t>(i));
    const double gamma = discounts[i % 4];
    const Mdp m = random_model(d, d.integer(1, 6), 3, 0, gamma);
    const Policy pi = random_policy(m, d);
    const VectorXd value = evaluate_policy_infinite(m, pi, tol).initial();
    const double diff = (value - oracle::linear_solve_value(m, pi)).cwiseAbs().maxCoeff();
    if (diff > tol) out.fail(format("infinite #%d: linear-solve oracle off by %.3g", i, diff));

    const DenseModel<double> dense(m);
    const double residual = (value - dense.average(pi.rule(0), dense.backup(value))).cwiseAbs().maxCoeff();
    if (residual > tol * (1.0 - gamma) / gamma) out.fail(format("infinite #%d: residual %.3g", i, residual));

    const double c = d.uniform(-2.0, 2.0);
    const Mdp shifted(m.states(), m.action_sets(), (m.rewards().array() + c).matrix(), m.kernel(), m.horizon(), gamma,
                      m.terminal());
    const double shift = (evaluate_policy_infinite(shifted, pi, tol).initial() - value).cwiseAbs().maxCoeff();
    const double expected = std::abs(c) / (1.0 - gamma);
    const VectorXd delta = evaluate_policy_infinite(shifted, pi, tol).initial() - value;
    if ((delta.array() - c / (1.0 - gamma)).abs().maxCoeff() > 2.0 * tol)
      out.fail(format("infinite #%d: reward shift moved values by %.12g, expected %.12g", i, shift, expected));

    const double lambda = d.uniform(0.1, 5.0);
    const Mdp scaled(m.states(), m.action_sets(), lambda * m.rewards(), m.kernel(), m.horizon(), gamma, m.terminal());
    const double scale_err =
        (evaluate_policy_infinite(scaled, pi, tol).initial() - lambda * value).cwiseAbs().maxCoeff();
    if (scale_err > (1.0 + lambda) * tol) out.fail(format("infinite #%d: reward scaling off by %.3g", i, scale_err));
  }
  if (out.passed) out.detail = format("%d finite and %d infinite instances", count, count);
  return out;
}

Outcome invariant_lp(const SuiteOptions& o) {
  Outcome out;
  const int count = o.quick ? 30 : 120;
  double worst = 0.0;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 12'000 + static_cast<std::uint64_t>(i));
    const Index n = 6;
    LinearProgram lp = nonnegative_lp(VectorXd::NullaryExpr(n, [&] { return d.uniform(-1.0, 1.0); }));
    const VectorXd x0 = VectorXd::NullaryExpr(n, [&] { return d.uniform(0.0, 1.0); });
    lp.upper = VectorXd::Constant(n, 2.0);
    if (d.chance(0.5)) lp.lower[d.integer(0, n - 1)] = -1.0;
    const Index eq = d.integer(0, 2), ub = d.integer(0, 3);
    lp.eq_matrix = MatrixXd::NullaryExpr(eq, n, [&] { return d.uniform(-1.0, 1.0); });
    lp.eq_rhs = lp.eq_matrix * x0;
    lp.ub_matrix = MatrixXd::NullaryExpr(ub, n, [&] { return d.uniform(-1.0, 1.0); });
    lp.ub_rhs = lp.ub_matrix * x0 + VectorXd::NullaryExpr(ub, [&] { return d.uniform(0.0, 0.5); });

    const LpSolution sol = solve_lp(lp);
    const std::optional<double> reference = oracle::lp_vertex_enumeration(lp);
    if (sol.status != LpStatus::Optimal || !reference) {
      out.fail(format("LP #%d: expected an optimum", i));
      continue;
    }
    const double diff = std::abs(sol.objective_value - *reference);
    worst = std::max(worst, diff);
    if (diff > 1e-8) out.fail(format("LP #%d: simplex %.17g vs vertices %.17g", i, sol.objective_value, *reference));
    if (constraint_violation(lp, sol.x) > tol::kLpFeasibility)
      out.fail(format("LP #%d: residual %.3g", i, constraint_violation(lp, sol.x)));
  }

  // Both hand-checkable degenerate statuses.
  LinearProgram infeasible = nonnegative_lp(VectorXd::Ones(2));
  infeasible.eq_matrix = MatrixXd::Ones(1, 2);
  infeasible.eq_rhs = VectorXd::Constant(1, -1.0);
  if (solve_lp(infeasible).status != LpStatus::Infeasible) out.fail("x >= 0, x1 + x2 = -1 not reported infeasible");
  const LinearProgram unbounded = nonnegative_lp(-VectorXd::Ones(2));
  if (solve_lp(unbounded).status != LpStatus::Unbounded) out.fail("min -x1 - x2 over x >= 0 not reported unbounded");

  // Inner LP: P1 = P2 = pbar is always feasible.
  for (int i = 0; i < 50; ++i) {
    Draws d(o.seed, 12'500 + static_cast<std::uint64_t>(i));
    const Index n = d.integer(2, 8);
    const ProbVector pbar = ProbVector::from(d.simplex(n));
    const LinearProgram lp = build_inner_lp(VectorXd::Zero(n), pbar, d.uniform(0.0, 0.5), d.uniform(0.0, 1.0),
                                            Direction::Min);
    VectorXd x(3 * n);
    x << pbar.vec(), pbar.vec(), pbar.vec();
    if (lp.num_constraints() != 6 * n + 3) out.fail(format("inner LP has %d constraints", int(lp.num_constraints())));
    if (constraint_violation(lp, x) > 1e-12) out.fail("pbar is not feasible for the inner LP");
  }
  if (out.passed) out.detail = format("%d random LPs, max |simplex - vertices| %.3g", count, worst);
  return out;
}

Outcome invariant_privacy(const SuiteOptions& o) {
  Outcome out;
  const double a = alpha_bound(7.0, 0.1);
  if (std::abs(a - 0.37935678234628659) > 1e-15) out.fail(format("alpha_bound(7, 0.1) = %.17g", a));
  if (alpha_bound(3.0, 1.0) != 0.0) out.fail("alpha_bound(k, 1) != 0");
  for (double k = 0.5; k < 1000.0; k *= 1.7)
    if (!(alpha_bound(k * 1.7, 0.05) < alpha_bound(k, 0.05) && alpha_bound(k, 0.06) < alpha_bound(k, 0.05)))
      out.fail(format("alpha_bound not decreasing near k=%g", k));

  // Adjacency.
  Draws adj(o.seed, 13'000);
  for (int i = 0; i < (o.quick ? 2000 : 10'000); ++i) {
    const Index n = adj.integer(2, 6);
    const ProbVector p = smooth(ProbVector::from(adj.simplex(n)), 0.05);
    const double b = adj.uniform(0.01, 1.0);
    const ProbVector q = adjacent_pair(p, b, adj.stream());
    if (!is_b_adjacent(p, q, b) || !q.is_interior() || std::abs(q.vec().sum() - 1.0) > 1e-12) {
      out.fail(format("adjacent_pair draw %d invalid", i));
      break;
    }
  }

  // Union-bounded concentration: P(max_i |x_i - p_i| >= alpha) <= 2 n beta.
  const int draws = o.quick ? 5000 : 20'000;
  for (double k : {1.0, 5.0, 20.0, 100.0}) {
    for (Index n : {Index{3}, Index{10}}) {
      Draws d(o.seed, 13'100 + static_cast<std::uint64_t>(k) * 20 + static_cast<std::uint64_t>(n));
      const ProbVector p = smooth(ProbVector::from(d.simplex(n)), 1e-3);
      for (double beta : {0.01, 0.05, 0.2}) {
        const double radius = alpha_bound(k, beta);
        int tails = 0;
        for (int i = 0; i < draws; ++i)
          tails += (dirichlet_sample(p, k, d.stream()).vec() - p.vec()).cwiseAbs().maxCoeff() >= radius ? 1 : 0;
        const double freq = static_cast<double>(tails) / draws;
        const double cap = std::min(1.0, 2.0 * static_cast<double>(n) * beta);
        // Three binomial standard errors of sampling slack on top of the cap.
        if (freq > cap + 3.0 * std::sqrt(cap * (1.0 - cap) / draws))
          out.fail(format("k=%g n=%d beta=%g: tail %.4f > 2 n beta", k, static_cast<int>(n), beta, freq));
      }
    }
  }

  // Determinism and stream independence.
  const Mdp m = build_example2(7);
  const PrivatizedMdp first = privatize_kernel(m, 10.0, RngStream(o.seed, StreamId{3}));
  const PrivatizedMdp second = privatize_kernel(m, 10.0, RngStream(o.seed, StreamId{3}));
  if (first.model().kernel() != second.model().kernel()) out.fail("same stream produced different kernels");
  {
    RngStream row_stream(o.seed, StreamId{3, 4, 2, domain::kPrivatize});
    const ProbVector alone = dirichlet_sample(ProbVector::from(m.kernel().row(m.pair(4, 2)).transpose()), 10.0,
                                              row_stream);
    if (alone.vec() != first.model().kernel().row(m.pair(4, 2)).transpose())
      out.fail("row draw depends on other rows");
  }
  try {
    privatize_kernel(build_example1(), 10.0, RngStream(o.seed));
    out.fail("non-interior example1 rows accepted in strict mode");
  } catch (const InvalidInput&) {
  }
  if (out.passed) out.detail = "alpha_bound, adjacency, union-bounded tails, stream determinism";
  return out;
}

Outcome invariant_synthesis(const SuiteOptions& o) {
  Outcome out;
  const Mdp ex1 = build_example1();
  const SynthesisResult r = synthesize_finite(ex1);
  if (r.policy.action_at(ex1, 0, 0) != 0 || std::abs(r.value.initial()[0] - 0.9) > 1e-12)
    out.fail("example1 without privatization should pick startup1 with value 0.9");

  const int count = o.quick ? 10 : 30;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 14'000 + static_cast<std::uint64_t>(i));
    const Mdp mbar = random_model(d, d.integer(2, 5), 3, 0, i % 2 ? 0.9 : 0.6);
    const double tol = 1e-8;
    const SynthesisResult s = synthesize_infinite(mbar, tol);
    const double self = (evaluate_policy_infinite(mbar, s.policy, tol).initial() - s.value.initial())
                            .cwiseAbs()
                            .maxCoeff();
    if (self > 2.0 * tol) out.fail(format("infinite #%d: policy value off by %.3g", i, self));
    // Optimal value dominates every deterministic policy's linear-solve value.
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<Index> acts;
      for (Index st = 0; st < mbar.num_states(); ++st) acts.push_back(d.integer(0, mbar.num_actions(st) - 1));
      const VectorXd other = oracle::linear_solve_value(mbar, Policy::deterministic(mbar, acts));
      if ((other - s.value.initial()).maxCoeff() > tol) out.fail(format("infinite #%d: beaten by a policy", i));
    }
  }
  if (out.passed) out.detail = format("example1 and %d infinite-horizon instances", count);
  return out;
}

Outcome invariant_robust(const SuiteOptions& o) {
  Outcome out;
  const int count = o.quick ? 300 : 1000;
  for (int i = 0; i < count; ++i) {
    Draws d(o.seed, 15'000 + static_cast<std::uint64_t>(i));
    const Index n = d.integer(1, 8);
    const VectorXd values = VectorXd::NullaryExpr(n, [&] { return d.uniform(-1.0, 1.0); });
    const auto u = UncertaintySet<double>::make(d.simplex(n), d.uniform(0.0, 0.5), d.uniform(0.0, 0.9));
    if (!is_member(u.pbar(), u)) out.fail(format("#%d: pbar not a member", i));
    for (Direction dir : {Direction::Min, Direction::Max}) {
      const Extremum<double> e = inner_extremum(values, u, dir);
      if (!is_member(e.witness, u)) out.fail(format("#%d: witness not a member", i));
      if (std::abs(e.witness.dot(values) - e.value) > 1e-12) out.fail(format("#%d: witness value mismatch", i));
    }
    // Constructive members.
    VectorXd p2 = u.pbar();
    for (int step = 0; step < 4 && n > 1; ++step) {
      const Index a = d.integer(0, n - 1), b = d.integer(0, n - 1);
      const double room = std::min({p2[b], u.pbar()[a] + u.alpha() - p2[a], p2[b] - (u.pbar()[b] - u.alpha())});
      if (a != b && room > 0.0) {
        const double t = d.uniform() * room;
        p2[a] += t;
        p2[b] -= t;
      }
    }
    const VectorXd p = u.beta() * d.simplex(n) + (1.0 - u.beta()) * p2;
    if (!is_member(p, u)) out.fail(format("#%d: constructed mixture rejected", i));
  }
  {
    const auto u = UncertaintySet<double>::make(VectorXd::Constant(2, 0.5), 0.1, 0.0);
    if (is_member(VectorXd(Eigen::Vector2d(0.8, 0.2)), u)) out.fail("point outside the box accepted with beta = 0");
    const auto half = UncertaintySet<double>::make(VectorXd::Constant(2, 0.5), 0.0, 0.5);
    if (std::abs(inner_extremum(Eigen::Vector2d(1.0, 0.0).eval(), half, Direction::Min).value - 0.25) > 1e-15)
      out.fail("closed-form example (0.25) mismatch");
  }

  // Enlarging alpha widens the bounds.
  for (int i = 0; i < (o.quick ? 30 : 100); ++i) {
    Draws d(o.seed, 16'000 + static_cast<std::uint64_t>(i));
    const Mdp mbar = random_model(d, d.integer(2, 6), 3, static_cast<int>(d.integer(1, 5)), 1.0);
    const Policy pi = random_policy(mbar, d);
    const double beta = d.uniform(0.0, 0.5), a1 = d.uniform(0.0, 0.5), a2 = a1 + d.uniform(0.0, 0.5);
    const BoundPair small = bounds_finite(mbar, pi, UncertaintyParams{a1, beta});
    const BoundPair large = bounds_finite(mbar, pi, UncertaintyParams{a2, beta});
    for (Index t = 0; t <= mbar.horizon().steps(); ++t) {
      if ((large.pessimistic.at(t) - small.pessimistic.at(t)).maxCoeff() > 1e-12 ||
          (small.optimistic.at(t) - large.optimistic.at(t)).maxCoeff() > 1e-12)
        out.fail(format("#%d: bounds shrank when alpha grew", i));
    }
    if (cost_of_privacy(large, 0) < cost_of_privacy(small, 0) - 1e-12) out.fail(format("#%d: cop shrank", i));
  }

  // Collapsed infinite-horizon bounds equal the policy value.
  for (int i = 0; i < (o.quick ? 5 : 20); ++i) {
    Draws d(o.seed, 17'000 + static_cast<std::uint64_t>(i));
    const Mdp mbar = random_model(d, d.integer(2, 6), 3, 0, 0.9);
    const Policy pi = random_policy(mbar, d);
    const double tol = 1e-8;
    const BoundPair b = bounds_infinite(mbar, pi, UncertaintyParams{0.0, 0.0}, tol);
    const VectorXd v = evaluate_policy_infinite(mbar, pi, tol).initial();
    if ((b.pessimistic.initial() - v).cwiseAbs().maxCoeff() > 2 * tol ||
        (b.optimistic.initial() - v).cwiseAbs().maxCoeff() > 2 * tol)
      out.fail(format("infinite #%d: collapsed bounds differ from the policy value", i));
  }
  if (out.passed) out.detail = format("%d uncertainty sets, witnesses, membership, alpha monotonicity", count);
  return out;
}

Outcome invariant_experiments(const SuiteOptions& o) {
  Outcome out;
  const Mdp a = build_example2(o.seed), b = build_example2(o.seed);
  if (a.num_states() != 20 || a.max_actions() != 5 || a.horizon().steps() != 10) out.fail("example2 dimensions");
  if (a.kernel().minCoeff() < 1e-3 || (a.kernel().rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-12)
    out.fail("example2 rows not interior and normalized");
  const std::string text = mdp_to_json(a);
  if (text != mdp_to_json(b)) out.fail("example2 not determined by its seed");
  if (mdp_to_json(mdp_from_json(text)) != text) out.fail("JSON round trip is not byte-identical");

  SweepConfig cfg;
  cfg.seed = o.seed;
  cfg.trials = o.quick ? 5 : 20;
  cfg.k_grid = {5.0, 20.0, 80.0, 320.0};
  for (const SweepRow& row : run_sweep(cfg)) {
    if (!(row.v_pess <= row.v_private + 1e-9 && row.v_private <= row.v_opt + 1e-9) || row.cop_bound < 0.0) {
      out.fail(format("k=%g trial %d: sandwich violated", row.k, row.trial));
      break;
    }
  }
  cfg.k_grid = {1e8};
  cfg.trials = 100;
  int near = 0;
  for (const SweepRow& row : run_sweep(cfg)) near += std::abs(row.v_nonprivate - 0.9) <= 0.01 ? 1 : 0;
  if (near < 99) out.fail(format("k=1e8: only %d/100 trials within 0.01 of 0.9", near));
  if (out.passed) out.detail = "builders, JSON round trip, per-row sandwich, large-k recovery";
  return out;
}

Check wrap(std::string name, Outcome (*fn)(const SuiteOptions&)) {
  return Check{name, [name, fn](const SuiteOptions& o) {
                 const Outcome r = fn(o);
                 return CheckResult{name, r.passed, r.detail, 0.0};
               }};
}

}  // namespace

std::vector<Check> invariant_checks() {
  return {
      wrap("mdp_core: policy evaluation", invariant_evaluation),
      wrap("lp_oracle: simplex vs vertex enumeration", invariant_lp),
      wrap("privacy: mechanism properties", invariant_privacy),
      wrap("synthesis: optimality", invariant_synthesis),
      wrap("robust_bounds: uncertainty sets and bounds", invariant_robust),
      wrap("experiments: builders and sweeps", invariant_experiments),
      wrap("privacy: Dirichlet marginal moments", criterion_moments),
      wrap("robust_bounds: structured solver vs LP", criterion_inner_exactness),
  };
}

std::vector<Check> acceptance_checks() {
  return {
      wrap("1 inner-solver exactness", criterion_inner_exactness),
      wrap("2 sandwich bound", criterion_sandwich),
      wrap("3 degenerate collapse", criterion_collapse),
      wrap("4 concentration", criterion_concentration),
      wrap("5 Dirichlet marginal moments", criterion_moments),
      wrap("6 trade-off trend", criterion_trend),
      wrap("7 contraction rate", criterion_contraction),
      wrap("8 runtime scaling", criterion_runtime_scaling),
      wrap("9 DP/oracle equivalence", criterion_oracles),
      wrap("10 determinism", criterion_determinism),
  };
}

std::vector<CheckResult> run_checks(const std::vector<Check>& checks, const SuiteOptions& options, std::ostream& out) {
  std::vector<CheckResult> results;
  for (const Check& check : checks) {
    const auto start = Clock::now();
    CheckResult r;
    try {
      r = check.run(options);
    } catch (const std::exception& e) {
      r = CheckResult{check.name, false, std::string("exception: ") + e.what(), 0.0};
    }
    r.seconds = seconds_since(start);
    out << (r.passed ? "PASS " : "FAIL ") << r.name << format(" (%.2f s)", r.seconds);
    if (!r.detail.empty()) out << ": " << r.detail;
    out << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

}  // namespace privmdp::validation
