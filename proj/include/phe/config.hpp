#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phe/environment.hpp"
#include "phe/simulator.hpp"
#include "phe/theory.hpp"

namespace phe {

// Config files are YAML. Every parse error is a ConfigError whose message
// starts with "<source>:<line>:".

struct ExperimentConfig {
  std::string name = "experiment";
  ProblemGenSpec problems;
  std::int64_t horizon = 10'000;
  std::size_t num_problems = 100;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::vector<LabeledPolicy> policies;

  /// Throws ConfigError on an empty policy list, duplicate labels or any
  /// invalid field.
  void validate() const;
  ExperimentPlan plan() const;
};

/// K = 10 arms with means drawn from [0.25, 0.75], n = 10^4, 100 problems,
/// UCB1, KL-UCB, TS, Giro(a=1), FPL and PHE at a = 0.5, 1.1, 2.1.
ExperimentConfig default_experiment_config(RewardFamily family = BernoulliFamily{});

ExperimentConfig parse_experiment_config(std::string_view text, std::string_view source = "<config>");
std::string to_yaml(const ExperimentConfig& config);

struct VerifyConfig {
  VerifyGrid grid;
  std::size_t workers = 1;
};

VerifyConfig parse_verify_config(std::string_view text, std::string_view source = "<config>");
std::string to_yaml(const VerifyConfig& config);

struct BenchConfig {
  TimingPlan plan;
};

/// TS, PHE(a=1.1) and Giro(a=1) on the default timing grid.
BenchConfig default_bench_config();

BenchConfig parse_bench_config(std::string_view text, std::string_view source = "<config>");
std::string to_yaml(const BenchConfig& config);

/// Whole file as text; throws ConfigError when it cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;

}  // namespace phe
