#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace phe {

struct CommandOptions {
  /// Empty selects the built-in default configuration.
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::size_t> workers;
  /// Replaces the config's master seed.
  std::optional<std::uint64_t> seed;
};

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitConfigError = 2,
  kExitIoError = 3,
  kExitInternalError = 4,
};

/// regret_<label>.csv per policy, summary.csv, manifest.json and regret.svg.
int cmd_run(const CommandOptions& options, std::ostream& log, std::ostream& err);

/// verify.csv; kExitCheckFailed when any mandatory row fails.
int cmd_verify(const CommandOptions& options, std::ostream& log, std::ostream& err);

/// bench.csv with one row per (policy, n, K).
int cmd_bench(const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace phe
