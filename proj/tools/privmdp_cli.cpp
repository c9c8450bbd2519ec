// privmdp: privatize MDP kernels, synthesize policies and bound the cost of
// privacy. Exit codes: 0 success, 1 failed validation or runtime error,
// 2 usage error or invalid input.

#include "privmdp/experiments.hpp"
#include "privmdp/mdp_io.hpp"
#include "privmdp/validation/suites.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace privmdp;

namespace {

struct ModelArgs {
  std::string mdp;
  int example = 0;
  std::uint64_t model_seed = 2024;
  bool support = false;
  std::string s0;

  void attach(CLI::App* app, int default_example) {
    example = default_example;
    auto* file = app->add_option("--mdp", mdp, "MDP JSON file");
    app->add_option("--example", example, "Built-in example (1 or 2)")->check(CLI::IsMember({1, 2}))->excludes(file);
    app->add_option("--model-seed", model_seed, "Seed for the generated Example 2 model");
    app->add_flag("--support", support, "Privatize each row over its support (non-interior rows)");
    app->add_option("--s0", s0, "Initial state name (default: first state)");
  }

  SweepConfig config() const {
    SweepConfig cfg;
    if (!mdp.empty()) cfg.source = mdp;
    else if (example == 2) cfg.source = "builtin:example2";
    else if (example == 1) cfg.source = "builtin:example1";
    else throw InvalidInput("pass --mdp FILE or --example 1|2");
    cfg.model_seed = model_seed;
    cfg.restrict_to_support = support;
    cfg.initial_state = s0;
    return cfg;
  }
};

void print_values(const Mdp& m, const ValueFunction& v, Index s0) {
  std::printf("value[%s] = %.17g\n", m.states()[static_cast<std::size_t>(s0)].c_str(), v.initial()[s0]);
  for (Index s = 0; s < m.num_states(); ++s)
    std::printf("  V0(%s) = %.17g\n", m.states()[static_cast<std::size_t>(s)].c_str(), v.initial()[s]);
}

void print_policy(const Mdp& m, const Policy& pi) {
  const Index stages = pi.is_stationary() ? 1 : pi.stages();
  for (Index t = 0; t < stages; ++t) {
    std::printf(pi.is_stationary() ? "policy (stationary):\n" : "policy stage %d:\n", static_cast<int>(t));
    for (Index s = 0; s < m.num_states(); ++s) {
      const Index a = pi.action_at(m, t, s);
      std::printf("  %s -> %s\n", m.states()[static_cast<std::size_t>(s)].c_str(),
                  m.actions(s)[static_cast<std::size_t>(a)].c_str());
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private MDP policy synthesis and cost-of-privacy bounds"};
  app.require_subcommand(1);

  // synthesize
  ModelArgs syn_model;
  double syn_k = 0.0, syn_tol = 1e-8;
  std::uint64_t syn_seed = 42, syn_trial = 0;
  auto* syn = app.add_subcommand("synthesize", "Privatize (if --k is given), synthesize and print policy and values");
  syn_model.attach(syn, 1);
  syn->add_option("--k", syn_k, "Dirichlet scale; omit to use the true kernel")->check(CLI::PositiveNumber);
  syn->add_option("--seed", syn_seed, "Master seed");
  syn->add_option("--trial", syn_trial, "Trial index of the stream id");
  syn->add_option("--tol", syn_tol, "Infinite-horizon tolerance")->check(CLI::PositiveNumber);

  // cop
  ModelArgs cop_model;
  double cop_k = 0.0, cop_beta = 0.05, cop_tol = 1e-8;
  std::uint64_t cop_seed = 42, cop_trial = 0;
  auto* cop = app.add_subcommand("cop", "One privatize/synthesize/bound run; prints the cost-of-privacy bound");
  cop_model.attach(cop, 1);
  cop->add_option("--k", cop_k, "Dirichlet scale")->required()->check(CLI::PositiveNumber);
  cop->add_option("--beta", cop_beta, "Tail probability in (0, 1)");
  cop->add_option("--seed", cop_seed, "Master seed");
  cop->add_option("--trial", cop_trial, "Trial index of the stream id");
  cop->add_option("--tol", cop_tol, "Infinite-horizon tolerance")->check(CLI::PositiveNumber);

  // sweep
  ModelArgs sweep_model;
  SweepConfig sweep_defaults;
  std::vector<double> sweep_k;
  std::string sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Seeded trials over a k grid, written as CSV");
  sweep_model.attach(sweep, 1);
  sweep->add_option("--k", sweep_k, "Comma-separated k grid (default 5*10^(j/2), j=0..4)")->delimiter(',');
  sweep->add_option("--beta", sweep_defaults.beta, "Tail probability in (0, 1)");
  sweep->add_option("--trials", sweep_defaults.trials, "Trials per k")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_defaults.seed, "Master seed");
  sweep->add_option("--tol", sweep_defaults.tol, "Infinite-horizon tolerance")->check(CLI::PositiveNumber);
  sweep->add_option("--threads", sweep_defaults.threads, "Worker threads (0: PRIVMDP_THREADS or all cores)");
  sweep->add_option("--out", sweep_out, "CSV path (default: standard output)");

  // probe
  ModelArgs probe_model;
  SweepConfig probe_defaults;
  double probe_k = 50.0;
  int probe_repeats = 5;
  auto* probe = app.add_subcommand("probe", "Cost-of-privacy wall time under doubled horizon and action sets");
  probe_model.attach(probe, 2);
  probe->add_option("--k", probe_k, "Dirichlet scale")->check(CLI::PositiveNumber);
  probe->add_option("--beta", probe_defaults.beta, "Tail probability in (0, 1)");
  probe->add_option("--seed", probe_defaults.seed, "Master seed");
  probe->add_option("--repeats", probe_repeats, "Timing repeats (median is reported)")->check(CLI::PositiveNumber);

  // validate
  validation::SuiteOptions validate_options;
  bool validate_acceptance = false;
  auto* validate = app.add_subcommand("validate", "Run the invariant suites (and optionally the acceptance criteria)");
  validate->add_flag("--quick", validate_options.quick, "Smaller instance counts and sample sizes");
  validate->add_option("--seed", validate_options.seed, "Seed for the generated test instances");
  validate->add_flag("--acceptance", validate_acceptance, "Also run the acceptance criteria");

  // export
  ModelArgs export_model;
  std::string export_out;
  auto* exp = app.add_subcommand("export", "Write a model as MDP JSON");
  export_model.attach(exp, 1);
  exp->add_option("--out", export_out, "Output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (syn->parsed()) {
      const SweepModel source = resolve_source(syn_model.config());
      if (syn_k > 0.0) {
        const PipelineResult run = run_pipeline(source.model, syn_k, RngStream(syn_seed, StreamId{syn_trial}), syn_tol,
                                                source.options);
        std::printf("k = %.17g, seed = %llu, trial = %llu\n", syn_k, static_cast<unsigned long long>(syn_seed),
                    static_cast<unsigned long long>(syn_trial));
        print_policy(source.model, run.synthesis.policy);
        print_values(source.model, run.synthesis.value, source.s0);
      } else {
        const SynthesisResult r = synthesize(source.model, syn_tol);
        std::printf("non-private synthesis\n");
        print_policy(source.model, r.policy);
        print_values(source.model, r.value, source.s0);
      }
    } else if (cop->parsed()) {
      const SweepModel source = resolve_source(cop_model.config());
      const CopReport r = run_trial(source.model, source.options, cop_k, cop_beta,
                                    RngStream(cop_seed, StreamId{cop_trial}), source.s0, cop_tol);
      std::printf("k = %.17g\nbeta = %.17g\nalpha = %.17g\n", r.k, r.beta, r.alpha);
      std::printf("v_private = %.17g\nv_nonprivate = %.17g\n", r.v_private, r.v_nonprivate.value_or(0.0));
      std::printf("v_pess = %.17g\nv_opt = %.17g\ncop_bound = %.17g\n", r.v_pessimistic, r.v_optimistic, r.cop_bound);
    } else if (sweep->parsed()) {
      SweepConfig cfg = sweep_model.config();
      cfg.beta = sweep_defaults.beta;
      cfg.trials = sweep_defaults.trials;
      cfg.seed = sweep_defaults.seed;
      cfg.tol = sweep_defaults.tol;
      cfg.threads = sweep_defaults.threads;
      if (!sweep_k.empty()) cfg.k_grid = sweep_k;
      std::cerr << "generator: " << RngStream::kGenerator << ", seed " << cfg.seed << ", "
                << resolve_thread_count(cfg.threads) << " thread(s)\n";
      const auto rows = run_sweep(cfg);
      if (sweep_out.empty()) std::cout << sweep_csv(rows);
      else write_sweep_csv(rows, sweep_out);
    } else if (probe->parsed()) {
      SweepConfig cfg = probe_model.config();
      cfg.k_grid = {probe_k};
      cfg.beta = probe_defaults.beta;
      cfg.seed = probe_defaults.seed;
      for (const ScalingEntry& e : runtime_probe(cfg, probe_repeats))
        std::printf("%-11s base %.4f ms  scaled %.4f ms  ratio %.3f\n", e.label.c_str(), e.base_ms, e.scaled_ms,
                    e.ratio);
    } else if (validate->parsed()) {
      auto checks = validation::invariant_checks();
      if (validate_acceptance) {
        const auto extra = validation::acceptance_checks();
        checks.insert(checks.end(), extra.begin(), extra.end());
      }
      const auto results = validation::run_checks(checks, validate_options, std::cout);
      return validation::all_passed(results) ? 0 : 1;
    } else if (exp->parsed()) {
      save_mdp(resolve_source(export_model.config()).model, export_out);
    }
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
