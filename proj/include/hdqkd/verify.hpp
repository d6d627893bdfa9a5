#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hdqkd {

enum class VerifyLevel { quick, full };

struct SuiteResult {
  std::string name;
  int checks = 0;
  int failures = 0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

/// Runs the per-module invariant suites (algebra, symmetrization, rate
/// closed forms, oracle agreement, finite-size sanity). `quick` covers
/// d <= 3 in seconds; `full` extends to d <= 7 and the prime list up to 13.
/// `inject_fault` deliberately corrupts one check's input to exercise the
/// failure path.
std::vector<SuiteResult> run_verification(VerifyLevel level, std::uint64_t seed,
                                          bool inject_fault = false);

}  // namespace hdqkd
