#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mpslab/config.hpp"

// Experiment registry and orchestration: dispatches validated configurations
// to the verification harnesses and simulators, writes one CSV (plus JSON
// twin) per result table and a run manifest, and maps outcomes to exit codes.

namespace mpslab {

enum class RunStatus : int {
  ok = 0,
  violations = 1,
  config_error = 2,
  resource_limit = 3,
  numerical_failure = 4,
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  bool stochastic = false;  // requires a seed
  // accepted parameter keys with one-line docs ("key: doc (default ...)")
  std::vector<std::pair<std::string, std::string>> keys;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);

// Validates a parsed document into a runnable configuration, accumulating
// every error (unknown experiment, unknown or mistyped keys, bad ranges,
// missing seed for stochastic experiments).
std::optional<ExperimentConfig> build_config(const ConfigDoc& doc, std::vector<ConfigError>& errors);

struct RunOutcome {
  RunStatus status = RunStatus::ok;
  long long violations = 0;
  std::vector<std::string> artifacts;
  std::string message;
};

// Runs the experiment, writing artifacts and a manifest under
// cfg.output_dir.  Never throws; failures are reported through the status.
RunOutcome run_experiment(const ExperimentConfig& cfg);

// Quick construction-level checks ("selftest" CLI verb); returns the number
// of failed checks.
int run_selftest(std::ostream& os);

// Deterministic static-partition parallel map; results must be written to
// caller-provided slots indexed by the argument.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace mpslab
