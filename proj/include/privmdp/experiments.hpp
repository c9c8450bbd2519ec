#pragma once

#include "privmdp/mdp.hpp"
#include "privmdp/privacy.hpp"
#include "privmdp/robust_bounds.hpp"
#include "privmdp/synthesis.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace privmdp {

/// Investment model: from s0 one of four startups is acquired and the deal
/// ends in Hit (+1) or Miss (0). Horizon 1, gamma = 1, Hit/Miss absorbing.
Mdp build_example1();

struct RandomMdpShape {
  Index states = 20;
  Index actions = 5;
  /// Positive: finite horizon with this many stages; 0: infinite horizon.
  int horizon = 10;
  double discount = 1.0;
  /// Every kernel entry is at least this large.
  double interior_floor = 1e-3;
};

/// Rows from a flat Dirichlet mixed with the uniform distribution so every
/// entry is >= interior_floor; rewards and terminal rewards uniform on [0, 1].
/// Fully determined by (shape, seed).
Mdp build_random_mdp(const RandomMdpShape& shape, std::uint64_t seed);

/// 20 states, 5 actions per state, horizon 10.
Mdp build_example2(std::uint64_t seed);

/// Geometric grid 5 * 10^(j/2), j = 0..4 (two decades).
std::vector<double> default_k_grid();

struct SweepConfig {
  /// "builtin:example1", "builtin:example2", or a path to an MDP JSON file.
  std::string source = "builtin:example1";
  std::vector<double> k_grid = default_k_grid();
  double beta = 0.05;
  int trials = 50;
  std::uint64_t seed = 42;
  /// Seed for generated models (builtin:example2).
  std::uint64_t model_seed = 2024;
  /// Infinite-horizon iteration tolerance.
  double tol = 1e-8;
  /// Privatize over row supports; always on for builtin:example1.
  bool restrict_to_support = false;
  /// Worker threads; 0 reads PRIVMDP_THREADS (0 or unset: hardware concurrency).
  unsigned threads = 0;
  /// Name of the initial state; empty selects the first state.
  std::string initial_state;
};

struct SweepModel {
  std::string example;
  Mdp model;
  PrivatizeOptions options;
  Index s0 = 0;
};

SweepModel resolve_source(const SweepConfig& cfg);

/// Privatize, synthesize, evaluate under the true kernel and bound, all at s0.
/// `action_s0` receives the stage-0 action of the private policy at s0.
CopReport run_trial(const Mdp& truth, const PrivatizeOptions& options, double k, double beta, const RngStream& stream,
                    Index s0, double tol, std::string* action_s0 = nullptr);

struct SweepRow {
  std::string example;
  double k = 0.0;
  double beta = 0.0;
  double alpha = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double v_private = 0.0;
  double v_nonprivate = 0.0;
  double v_pess = 0.0;
  double v_opt = 0.0;
  double cop_bound = 0.0;
  std::string action_s0;
  double t_privatize_ms = 0.0;
  double t_synth_ms = 0.0;
  double t_bounds_ms = 0.0;
};

/// Worker count: `requested` if nonzero, else PRIVMDP_THREADS, else hardware.
unsigned resolve_thread_count(unsigned requested);

/// One row per (k, trial), sorted by (k, trial). Trial t uses the stream
/// (seed, trial = t) for every k, so results do not depend on scheduling.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

inline constexpr const char* kSweepCsvHeader =
    "example,k,beta,alpha,trial,seed,v_private,v_nonprivate,v_pess,v_opt,cop_bound,action_s0,t_privatize_ms,t_synth_ms,"
    "t_bounds_ms";

/// CSV text with header. Without timings the three runtime columns are left
/// empty; that form is the determinism fingerprint of a sweep.
std::string sweep_csv(const std::vector<SweepRow>& rows, bool with_timings = true);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::filesystem::path& path);

struct SweepStats {
  double k = 0.0;
  int n = 0;
  double mean_private = 0.0, mean_nonprivate = 0.0, mean_pess = 0.0, mean_opt = 0.0, mean_cop = 0.0;
  double se_nonprivate = 0.0, se_pess = 0.0, se_opt = 0.0, se_cop = 0.0;
};

/// Per-k means and standard errors, in ascending k.
std::vector<SweepStats> summarize(const std::vector<SweepRow>& rows);

struct ScalingEntry {
  std::string label;
  double base_ms = 0.0;
  double scaled_ms = 0.0;
  double ratio = 0.0;
};

/// Median wall time (ms) of one bound computation over `repeats` runs.
double time_bounds_ms(const Mdp& mbar, const Policy& pi, UncertaintyParams params, double tol, int repeats);

/// Cost-of-privacy wall time at doubled horizon, doubled action sets and
/// (for generated models) halved state space, relative to the base model.
std::vector<ScalingEntry> runtime_probe(const SweepConfig& base, int repeats = 5);

/// Copy of `m` where every action appears twice (same reward and row).
Mdp duplicate_actions(const Mdp& m);

}  // namespace privmdp
