#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "phe/environment.hpp"
#include "phe/policy.hpp"
#include "phe/rng.hpp"

namespace phe {

struct EpisodeConfig {
  std::int64_t horizon = 10'000;
  PolicySpec policy = PheSpec{};
  BanditInstance instance;
  SeedSpec seed;
};

/// Cumulative pseudo-regret R(t) = sum of gaps of the arms pulled in rounds 1..t.
struct RegretCurve {
  std::vector<double> cumulative_regret;
  std::vector<std::int64_t> pull_counts;

  double final_regret() const { return cumulative_regret.empty() ? 0.0 : cumulative_regret.back(); }
};

/// Runs n select/pull/update cycles. The episode's environment and policy
/// streams are two lanes of derive_stream(config.seed).
RegretCurve run_episode(const EpisodeConfig& config);

/// Same loop with caller-owned policy and streams.
RegretCurve run_episode(Policy& policy, const BanditInstance& instance, std::int64_t horizon,
                        Stream& env_stream, Stream& policy_stream);

struct LabeledPolicy {
  std::string label;
  PolicySpec spec;
};

struct ExperimentPlan {
  ProblemGenSpec problems;
  std::vector<LabeledPolicy> policies;
  std::int64_t horizon = 10'000;
  std::size_t num_problems = 100;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

struct AggregateResult {
  std::string label;
  std::vector<double> mean_curve;
  std::vector<double> stderr_curve;
  /// Summed over this policy's episodes; not part of any deterministic output.
  double wall_clock_seconds = 0.0;
  std::size_t num_problems = 0;
};

/// Problem p of an experiment. Every policy faces this exact instance.
BanditInstance experiment_instance(const ProblemGenSpec& problems, std::uint64_t master_seed,
                                   std::size_t problem);

/// Seed of policy `policy_index` on problem p.
SeedSpec experiment_seed(std::uint64_t master_seed, std::size_t problem, std::size_t policy_index);

/// Runs every policy on every generated problem. Results are reduced in
/// problem order, so they do not depend on the worker count.
std::vector<AggregateResult> run_experiment(const ExperimentPlan& plan);

struct TimingPlan {
  std::vector<LabeledPolicy> policies;
  std::vector<std::size_t> arm_counts = {5, 10, 20};
  std::vector<std::int64_t> horizons = {1'000, 10'000};
  int repeats = 3;
  RewardFamily family = BetaFamily{4.0};
  double mean_low = 0.25;
  double mean_high = 0.75;
  std::uint64_t master_seed = 0;
};

struct TimingRow {
  std::string label;
  std::size_t num_arms = 0;
  std::int64_t horizon = 0;
  double total_seconds = 0.0;
  /// Mean seconds per round over the first and last 10% of rounds.
  double first_decile_per_round = 0.0;
  double last_decile_per_round = 0.0;
};

/// Wall-clock cost per (policy, K, n). One warm-up episode is discarded
/// before `repeats` timed episodes.
std::vector<TimingRow> time_policies(const TimingPlan& plan);

}  // namespace phe
