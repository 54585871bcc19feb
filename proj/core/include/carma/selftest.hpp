#pragma once

#include <string>
#include <vector>

namespace carma {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

struct AcceptanceOptions {
  /// Path to the CLI binary, used by the reproducibility criterion; that
  /// criterion is skipped (and reported failed) when empty.
  std::string cli_path;
  /// Directory with the shipped example configs.
  std::string config_dir = "configs";
  /// Scratch directory for intermediate files.
  std::string work_dir = ".";
  /// Trims the Monte Carlo sizes (CLI selftest); the full acceptance suite
  /// runs with false.
  bool fast = false;
};

/// Runs acceptance criterion `id` (1..10).
CriterionResult run_criterion(int id, const AcceptanceOptions& options);

/// Runs all criteria in order.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

} // namespace carma
