#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bef/cli/config.hpp"

namespace bef::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitBudget = 3,
  kExitInternal = 4,
};

const std::vector<std::string>& subcommands();

struct RunRequest {
  std::string subcommand;
  std::string config_path;  // optional for `report`
  std::vector<std::string> sets;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> formats;
};

/// Loads the config, applies flag overrides, runs, writes files. Returns the
/// process exit code; diagnostics go to `log`.
int run(const RunRequest& request, std::ostream& log);

/// Config resolution shared with tests: file + --set + dedicated flags.
ExperimentConfig resolve_config(const RunRequest& request);

struct RunOutput {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // written paths, in write order
};

/// Runs one subcommand on a resolved config. Everything is computed before
/// the first file is written.
RunOutput execute(const std::string& subcommand, const ExperimentConfig& config, std::ostream& log);

}  // namespace bef::cli
