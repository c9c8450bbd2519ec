#pragma once

// Self-checks shared by `privmdp validate` and the acceptance binary.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace privmdp::validation {

struct SuiteOptions {
  /// Smaller instance counts and sample sizes; same assertions.
  bool quick = false;
  std::uint64_t seed = 20240611;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct Check {
  std::string name;
  std::function<CheckResult(const SuiteOptions&)> run;
};

/// Module invariants and oracle cross-checks; all provable, expected green.
std::vector<Check> invariant_checks();

/// The ten acceptance criteria, in order, asserted exactly as stated.
std::vector<Check> acceptance_checks();

/// Runs each check, printing one "PASS|FAIL name (seconds) detail" line.
/// Exceptions count as failures.
std::vector<CheckResult> run_checks(const std::vector<Check>& checks, const SuiteOptions& options, std::ostream& out);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace privmdp::validation
