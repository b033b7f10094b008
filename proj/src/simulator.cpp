#include "phe/simulator.hpp"

#include <chrono>
#include <cmath>

#include <fmt/format.h>

#include "phe/errors.hpp"
#include "phe/log.hpp"
#include "phe/parallel.hpp"

namespace phe {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kEnvironmentLane = 0;
constexpr std::uint64_t kPolicyLane = 1;
constexpr std::uint64_t kInstanceLane = 2;

struct DecileClock {
  std::int64_t first_end = 0;
  std::int64_t last_start = 0;
  Clock::time_point start;
  Clock::time_point first_done;
  Clock::time_point last_begin;
  Clock::time_point end;
};

RegretCurve episode_loop(Policy& policy, const BanditInstance& instance, std::int64_t horizon,
                         Stream& env_stream, Stream& policy_stream, DecileClock* clock) {
  if (horizon < 1) throw UsageError(fmt::format("horizon must be positive, got {}", horizon));
  if (policy.num_arms() != instance.num_arms()) {
    throw UsageError(fmt::format("policy has {} arms but the instance has {}", policy.num_arms(),
                                 instance.num_arms()));
  }
  RegretCurve curve;
  curve.cumulative_regret.resize(static_cast<std::size_t>(horizon));
  curve.pull_counts.assign(instance.num_arms(), 0);
  const auto gaps = instance.gaps();
  double regret = 0.0;
  if (clock) clock->start = Clock::now();
  for (std::int64_t t = 1; t <= horizon; ++t) {
    if (clock && t == clock->last_start) clock->last_begin = Clock::now();
    const std::size_t arm = policy.select(t, policy_stream);
    const double reward = pull(instance, arm, env_stream);
    policy.update(arm, reward, policy_stream);
    regret += gaps[arm];
    curve.cumulative_regret[static_cast<std::size_t>(t - 1)] = regret;
    ++curve.pull_counts[arm];
    if (clock && t == clock->first_end) clock->first_done = Clock::now();
  }
  if (clock) clock->end = Clock::now();
  return curve;
}

double seconds(Clock::duration d) { return std::chrono::duration<double>(d).count(); }

}  // namespace

RegretCurve run_episode(Policy& policy, const BanditInstance& instance, std::int64_t horizon,
                        Stream& env_stream, Stream& policy_stream) {
  return episode_loop(policy, instance, horizon, env_stream, policy_stream, nullptr);
}

RegretCurve run_episode(const EpisodeConfig& config) {
  if (config.horizon < static_cast<std::int64_t>(config.instance.num_arms())) {
    log_warning(fmt::format("horizon {} is shorter than the {} initialization pulls", config.horizon,
                            config.instance.num_arms()));
  }
  auto policy = make_policy(config.policy, config.instance.num_arms());
  const Stream base = derive_stream(config.seed);
  Stream env = base.substream(kEnvironmentLane);
  Stream decisions = base.substream(kPolicyLane);
  return episode_loop(*policy, config.instance, config.horizon, env, decisions, nullptr);
}

BanditInstance experiment_instance(const ProblemGenSpec& problems, std::uint64_t master_seed,
                                   std::size_t problem) {
  Stream stream = derive_stream({.master_seed = master_seed, .problem_index = problem, .run_index = 0, .round_index = std::nullopt}).substream(kInstanceLane);
  return generate_problem(problems, stream);
}

SeedSpec experiment_seed(std::uint64_t master_seed, std::size_t problem, std::size_t policy_index) {
  return {.master_seed = master_seed, .problem_index = problem, .run_index = policy_index, .round_index = std::nullopt};
}

std::vector<AggregateResult> run_experiment(const ExperimentPlan& plan) {
  if (plan.num_problems < 1) throw UsageError("an experiment needs at least one problem");
  if (plan.policies.empty()) throw UsageError("an experiment needs at least one policy");
  plan.problems.validate();
  for (const auto& p : plan.policies) validate(p.spec);

  const std::size_t num_problems = plan.num_problems;
  const std::size_t num_policies = plan.policies.size();
  std::vector<BanditInstance> instances;
  instances.reserve(num_problems);
  for (std::size_t p = 0; p < num_problems; ++p) {
    instances.push_back(experiment_instance(plan.problems, plan.master_seed, p));
  }

  // curves[policy * num_problems + problem]
  std::vector<std::vector<double>> curves(num_policies * num_problems);
  std::vector<double> elapsed(num_policies * num_problems, 0.0);
  parallel_for(curves.size(), plan.workers, [&](std::size_t task) {
    const std::size_t j = task / num_problems;
    const std::size_t p = task % num_problems;
    const auto start = Clock::now();
    RegretCurve curve = run_episode(EpisodeConfig{
        .horizon = plan.horizon,
        .policy = plan.policies[j].spec,
        .instance = instances[p],
        .seed = experiment_seed(plan.master_seed, p, j),
    });
    elapsed[task] = seconds(Clock::now() - start);
    curves[task] = std::move(curve.cumulative_regret);
  });

  std::vector<AggregateResult> results;
  results.reserve(num_policies);
  const auto n = static_cast<std::size_t>(plan.horizon);
  const auto count = static_cast<double>(num_problems);
  for (std::size_t j = 0; j < num_policies; ++j) {
    AggregateResult result;
    result.label = plan.policies[j].label;
    result.num_problems = num_problems;
    result.mean_curve.assign(n, 0.0);
    result.stderr_curve.assign(n, 0.0);
    for (std::size_t p = 0; p < num_problems; ++p) {
      const auto& curve = curves[j * num_problems + p];
      for (std::size_t t = 0; t < n; ++t) result.mean_curve[t] += curve[t];
      result.wall_clock_seconds += elapsed[j * num_problems + p];
    }
    for (double& m : result.mean_curve) m /= count;
    if (num_problems > 1) {
      for (std::size_t p = 0; p < num_problems; ++p) {
        const auto& curve = curves[j * num_problems + p];
        for (std::size_t t = 0; t < n; ++t) {
          const double d = curve[t] - result.mean_curve[t];
          result.stderr_curve[t] += d * d;
        }
      }
      for (double& s : result.stderr_curve) s = std::sqrt(s / (count - 1.0)) / std::sqrt(count);
    }
    results.push_back(std::move(result));
  }
  return results;
}

std::vector<TimingRow> time_policies(const TimingPlan& plan) {
  if (plan.repeats < 1) throw UsageError("timing needs at least one repeat");
  std::vector<TimingRow> rows;
  for (std::size_t j = 0; j < plan.policies.size(); ++j) {
    const auto& labeled = plan.policies[j];
    for (std::int64_t horizon : plan.horizons) {
      for (std::size_t num_arms : plan.arm_counts) {
        const ProblemGenSpec problems{num_arms, plan.mean_low, plan.mean_high, plan.family};
        TimingRow row{labeled.label, num_arms, horizon, 0.0, 0.0, 0.0};
        const std::int64_t decile = std::max<std::int64_t>(1, horizon / 10);
        // Repeat 0 is the discarded warm-up.
        for (int rep = 0; rep <= plan.repeats; ++rep) {
          const auto problem = static_cast<std::size_t>(rep);
          const BanditInstance instance = experiment_instance(problems, plan.master_seed, problem);
          auto policy = make_policy(labeled.spec, num_arms);
          const Stream base = derive_stream(experiment_seed(plan.master_seed, problem, j));
          Stream env = base.substream(kEnvironmentLane);
          Stream decisions = base.substream(kPolicyLane);
          DecileClock clock;
          clock.first_end = decile;
          clock.last_start = horizon - decile + 1;
          episode_loop(*policy, instance, horizon, env, decisions, &clock);
          if (rep == 0) continue;
          row.total_seconds += seconds(clock.end - clock.start);
          row.first_decile_per_round += seconds(clock.first_done - clock.start) / static_cast<double>(decile);
          row.last_decile_per_round += seconds(clock.end - clock.last_begin) / static_cast<double>(decile);
        }
        row.first_decile_per_round /= plan.repeats;
        row.last_decile_per_round /= plan.repeats;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace phe
