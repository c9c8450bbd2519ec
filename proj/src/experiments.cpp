#include "privmdp/experiments.hpp"

#include "privmdp/mdp_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace privmdp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

Mdp build_example1() {
  std::vector<std::string> states{"s0", "Hit", "Miss"};
  std::vector<std::vector<std::string>> actions{
      {"startup1", "startup2", "startup3", "startup4"}, {"stay"}, {"stay"}};
  MatrixXd kernel(6, 3);
  // clang-format off
  kernel << 0.0, 0.9, 0.1,
            0.0, 0.2, 0.8,
            0.0, 0.8, 0.2,
            0.0, 0.3, 0.7,
            0.0, 1.0, 0.0,
            0.0, 0.0, 1.0;
  // clang-format on
  VectorXd terminal(3);
  terminal << 0.0, 1.0, 0.0;
  return Mdp(std::move(states), std::move(actions), VectorXd::Zero(6), std::move(kernel), Horizon::finite(1), 1.0,
             std::move(terminal));
}

Mdp build_random_mdp(const RandomMdpShape& shape, std::uint64_t seed) {
  if (shape.states <= 0 || shape.actions <= 0) throw InvalidInput("build_random_mdp: empty shape");
  const double n = static_cast<double>(shape.states);
  if (!(shape.interior_floor >= 0.0 && shape.interior_floor * n < 1.0))
    throw InvalidInput("build_random_mdp: interior floor too large for the state count");

  RngStream rng(seed, StreamId{0, 0, 0, domain::kModel});
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;
  for (Index s = 0; s < shape.states; ++s) {
    states.push_back("s" + std::to_string(s));
    std::vector<std::string> names;
    for (Index a = 0; a < shape.actions; ++a) names.push_back("a" + std::to_string(a));
    actions.push_back(std::move(names));
  }
  const Index pairs = shape.states * shape.actions;
  MatrixXd kernel(pairs, shape.states);
  for (Index sa = 0; sa < pairs; ++sa) {
    VectorXd row(shape.states);
    for (Index j = 0; j < shape.states; ++j) row[j] = -std::log(rng.uniform());  // Gamma(1)
    row /= row.sum();
    kernel.row(sa) = ((1.0 - shape.interior_floor * n) * row.array() + shape.interior_floor).matrix().transpose();
  }
  VectorXd rewards(pairs);
  for (Index sa = 0; sa < pairs; ++sa) rewards[sa] = rng.uniform();
  VectorXd terminal(shape.states);
  for (Index s = 0; s < shape.states; ++s) terminal[s] = rng.uniform();
  const Horizon horizon = shape.horizon > 0 ? Horizon::finite(shape.horizon) : Horizon::infinite();
  if (!horizon.is_finite()) terminal.setZero();
  return Mdp(std::move(states), std::move(actions), std::move(rewards), std::move(kernel), horizon, shape.discount,
             std::move(terminal));
}

Mdp build_example2(std::uint64_t seed) { return build_random_mdp(RandomMdpShape{}, seed); }

std::vector<double> default_k_grid() {
  std::vector<double> grid;
  for (int j = 0; j <= 4; ++j) grid.push_back(5.0 * std::pow(10.0, 0.5 * j));
  return grid;
}

SweepModel resolve_source(const SweepConfig& cfg) {
  SweepModel out{"", build_example1(), PrivatizeOptions{cfg.restrict_to_support}, 0};
  if (cfg.source == "builtin:example1") {
    out.example = "example1";
    out.options.restrict_to_support = true;
  } else if (cfg.source == "builtin:example2") {
    out.example = "example2";
    out.model = build_example2(cfg.model_seed);
  } else {
    const std::filesystem::path path(cfg.source);
    out.example = path.stem().string();
    out.model = load_mdp(path);
  }
  require_valid(out.model);
  if (!cfg.initial_state.empty()) {
    const auto s0 = out.model.find_state(cfg.initial_state);
    if (!s0) throw InvalidInput("unknown initial state " + cfg.initial_state);
    out.s0 = *s0;
  }
  return out;
}

CopReport run_trial(const Mdp& truth, const PrivatizeOptions& options, double k, double beta, const RngStream& stream,
                    Index s0, double tol, std::string* action_s0) {
  const PrivacyParams params = PrivacyParams::make(k, beta);
  CopReport report;
  report.k = k;
  report.beta = beta;
  report.alpha = params.alpha;
  report.seed = stream.seed();
  report.trial = stream.id().trial;

  auto start = Clock::now();
  const PrivatizedMdp privatized = privatize_kernel(truth, k, stream, options);
  report.t_privatize_ms = elapsed_ms(start);

  start = Clock::now();
  const SynthesisResult synthesis = synthesize(privatized, tol);
  report.t_synth_ms = elapsed_ms(start);

  start = Clock::now();
  const BoundPair bounds = compute_bounds(privatized.model(), synthesis.policy, params.uncertainty(), tol);
  report.t_bounds_ms = elapsed_ms(start);

  report.v_private = synthesis.value.initial()[s0];
  report.v_pessimistic = bounds.pessimistic.initial()[s0];
  report.v_optimistic = bounds.optimistic.initial()[s0];
  report.cop_bound = cost_of_privacy(bounds, s0);
  // Evaluation harness only: the true kernel scores the private policy.
  report.v_nonprivate = evaluate_policy(truth, synthesis.policy, tol).initial()[s0];
  if (action_s0) {
    const Index a = synthesis.policy.action_at(truth, 0, s0);
    *action_s0 = truth.actions(s0)[static_cast<std::size_t>(a)];
  }
  return report;
}

unsigned resolve_thread_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PRIVMDP_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  if (cfg.k_grid.empty()) throw InvalidInput("sweep: empty k grid");
  if (cfg.trials < 1) throw InvalidInput("sweep: trials must be >= 1");
  for (double k : cfg.k_grid)
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("sweep: k values must be positive");
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw InvalidInput("sweep: beta must lie in (0, 1)");

  const SweepModel source = resolve_source(cfg);
  const auto trials = static_cast<std::size_t>(cfg.trials);
  const std::size_t tasks = cfg.k_grid.size() * trials;
  std::vector<SweepRow> rows(tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      try {
        const double k = cfg.k_grid[task / trials];
        const auto trial = static_cast<std::uint64_t>(task % trials);
        SweepRow& row = rows[task];
        const CopReport r = run_trial(source.model, source.options, k, cfg.beta, RngStream(cfg.seed, StreamId{trial}),
                                      source.s0, cfg.tol, &row.action_s0);
        row.example = source.example;
        row.k = k;
        row.beta = cfg.beta;
        row.alpha = r.alpha;
        row.trial = static_cast<int>(trial);
        row.seed = cfg.seed;
        row.v_private = r.v_private;
        row.v_nonprivate = *r.v_nonprivate;
        row.v_pess = r.v_pessimistic;
        row.v_opt = r.v_optimistic;
        row.cop_bound = r.cop_bound;
        row.t_privatize_ms = r.t_privatize_ms;
        row.t_synth_ms = r.t_synth_ms;
        row.t_bounds_ms = r.t_bounds_ms;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned n_threads = std::min<unsigned>(resolve_thread_count(cfg.threads), static_cast<unsigned>(tasks));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    return a.k != b.k ? a.k < b.k : a.trial < b.trial;
  });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_timings) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%d,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%s,", r.example.c_str(),
                  r.k, r.beta, r.alpha, r.trial, static_cast<unsigned long long>(r.seed), r.v_private, r.v_nonprivate,
                  r.v_pess, r.v_opt, r.cop_bound, r.action_s0.c_str());
    out += buf;
    if (with_timings) {
      std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f", r.t_privatize_ms, r.t_synth_ms, r.t_bounds_ms);
      out += buf;
    } else {
      out += ",,";
    }
    out += "\n";
  }
  return out;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << sweep_csv(rows);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<SweepStats> summarize(const std::vector<SweepRow>& rows) {
  std::vector<double> ks;
  for (const auto& r : rows) ks.push_back(r.k);
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::vector<SweepStats> out;
  for (double k : ks) {
    std::vector<const SweepRow*> group;
    for (const auto& r : rows)
      if (r.k == k) group.push_back(&r);
    const double n = static_cast<double>(group.size());
    auto mean_se = [&](auto field) {
      double sum = 0.0;
      for (const auto* r : group) sum += field(*r);
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto* r : group) ss += (field(*r) - mean) * (field(*r) - mean);
      const double se = group.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
      return std::pair{mean, se};
    };
    SweepStats s;
    s.k = k;
    s.n = static_cast<int>(group.size());
    s.mean_private = mean_se([](const SweepRow& r) { return r.v_private; }).first;
    std::tie(s.mean_nonprivate, s.se_nonprivate) = mean_se([](const SweepRow& r) { return r.v_nonprivate; });
    std::tie(s.mean_pess, s.se_pess) = mean_se([](const SweepRow& r) { return r.v_pess; });
    std::tie(s.mean_opt, s.se_opt) = mean_se([](const SweepRow& r) { return r.v_opt; });
    std::tie(s.mean_cop, s.se_cop) = mean_se([](const SweepRow& r) { return r.cop_bound; });
    out.push_back(s);
  }
  return out;
}

double time_bounds_ms(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol, int repeats) {
  constexpr double kMinBatchMs = 40.0;
  std::vector<double> samples;
  for (int r = 0; r < repeats; ++r) {
    int calls = 0;
    const auto start = Clock::now();
    double spent = 0.0;
    do {
      const BoundPair b = compute_bounds(mbar, pi, params, tol);
      if (b.pessimistic.stages.empty()) throw std::logic_error("empty bounds");
      ++calls;
      spent = elapsed_ms(start);
    } while (spent < kMinBatchMs);
    samples.push_back(spent / calls);
  }
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

Mdp duplicate_actions(const Mdp& m) {
  std::vector<std::vector<std::string>> actions;
  std::vector<Index> source_pairs;
  for (Index s = 0; s < m.num_states(); ++s) {
    std::vector<std::string> names = m.actions(s);
    for (const auto& a : m.actions(s)) names.push_back(a + "'");
    actions.push_back(std::move(names));
    for (int copy = 0; copy < 2; ++copy)
      for (Index a = 0; a < m.num_actions(s); ++a) source_pairs.push_back(m.pair(s, a));
  }
  const auto pairs = static_cast<Index>(source_pairs.size());
  VectorXd rewards(pairs);
  MatrixXd kernel(pairs, m.num_states());
  for (Index i = 0; i < pairs; ++i) {
    rewards[i] = m.rewards()[source_pairs[static_cast<std::size_t>(i)]];
    kernel.row(i) = m.kernel().row(source_pairs[static_cast<std::size_t>(i)]);
  }
  return Mdp(m.states(), std::move(actions), std::move(rewards), std::move(kernel), m.horizon(), m.discount(),
             m.terminal());
}

std::vector<ScalingEntry> runtime_probe(const SweepConfig& base, int repeats) {
  const SweepModel source = resolve_source(base);
  if (!source.model.horizon().is_finite()) throw InvalidInput("runtime_probe: needs a finite-horizon model");
  const double k = base.k_grid.front();
  const UncertaintyParams params = PrivacyParams::make(k, base.beta).uncertainty();
  const RngStream stream(base.seed, StreamId{0});

  auto measure = [&](const Mdp& truth) {
    const PrivatizedMdp privatized = privatize_kernel(truth, k, stream, source.options);
    const SynthesisResult synthesis = synthesize(privatized, base.tol);
    return time_bounds_ms(privatized.model(), synthesis.policy, params, base.tol, repeats);
  };

  const bool generated = base.source == "builtin:example2";
  const RandomMdpShape shape{};
  const double base_ms = measure(source.model);
  std::vector<ScalingEntry> out;
  auto add = [&](std::string label, double scaled_ms) {
    out.push_back(ScalingEntry{std::move(label), base_ms, scaled_ms, scaled_ms / base_ms});
  };

  const int T = source.model.horizon().steps();
  if (generated) {
    add("horizon x2", measure(build_random_mdp({shape.states, shape.actions, 2 * T, shape.discount}, base.model_seed)));
    add("actions x2",
        measure(build_random_mdp({shape.states, 2 * shape.actions, T, shape.discount}, base.model_seed)));
    add("states /2", measure(build_random_mdp({shape.states / 2, shape.actions, T, shape.discount}, base.model_seed)));
  } else {
    add("horizon x2", measure(source.model.with_horizon(Horizon::finite(2 * T))));
    add("actions x2", measure(duplicate_actions(source.model)));
  }
  return out;
}

}  // namespace privmdp
