#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tftlab/config.hpp"

namespace tftlab {

enum ExitCode : int {
  kPass = 0,
  kPhysicsFailure = 1,
  kInconclusive = 2,
  kInvalidConfig = 3,
};

enum class OutputFormat { Json, Csv, Both };

struct RunOptions {
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Both;
  std::size_t workers = 1;
  std::optional<std::uint64_t> seed;  // overrides the config's seed
};

struct RunResult {
  int exit_code = kInvalidConfig;
  std::string error;  // set when the run was rejected or aborted
  nlohmann::json summary;
  std::vector<std::filesystem::path> files;
};

// Runs the experiment named by the config's `experiment` key and writes its
// artifacts under out_dir. Never throws; configuration problems come back as
// kInvalidConfig with a message. Outputs do not depend on options.workers.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options);

}  // namespace tftlab
