#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "phe/rng.hpp"

namespace phe {

struct BernoulliFamily {
  friend bool operator==(const BernoulliFamily&, const BernoulliFamily&) = default;
};

/// Arm i draws from Beta(v * mu_i, v * (1 - mu_i)).
struct BetaFamily {
  double v = 4.0;
  friend bool operator==(const BetaFamily&, const BetaFamily&) = default;
};

/// Raw rewards live on [low, high] and are mapped back to [0, 1] on every pull.
///
/// The raw draw for an arm with mean mu is low + (high - low) * X, where X is
/// uniform on [mu - w, mu + w] with w = min(mu, 1 - mu).
struct RescaledFamily {
  double low = 0.0;
  double high = 1.0;
  friend bool operator==(const RescaledFamily&, const RescaledFamily&) = default;
};

using RewardFamily = std::variant<BernoulliFamily, BetaFamily, RescaledFamily>;

std::string family_name(const RewardFamily& family);

/// An immutable K-armed stochastic bandit with rewards in [0, 1].
class BanditInstance {
 public:
  BanditInstance(std::vector<double> means, RewardFamily family);

  std::size_t num_arms() const noexcept { return means_.size(); }
  std::span<const double> means() const noexcept { return means_; }
  std::span<const double> gaps() const noexcept { return gaps_; }
  double mean(std::size_t arm) const { return means_.at(arm); }
  double gap(std::size_t arm) const { return gaps_.at(arm); }
  double best_mean() const noexcept { return best_mean_; }
  double max_gap() const noexcept;
  std::size_t best_arm() const noexcept;
  const RewardFamily& family() const noexcept { return family_; }

  /// Gaps of the strictly suboptimal arms, in arm order.
  std::vector<double> positive_gaps() const;

  friend bool operator==(const BanditInstance&, const BanditInstance&) = default;

 private:
  std::vector<double> means_;
  std::vector<double> gaps_;
  double best_mean_ = 0.0;
  RewardFamily family_;
};

struct ProblemGenSpec {
  std::size_t num_arms = 10;
  double mean_low = 0.25;
  double mean_high = 0.75;
  RewardFamily family = BernoulliFamily{};

  void validate() const;
};

/// Draws a reward for `arm`; always in [0, 1]. Throws UsageError on a bad arm.
double pull(const BanditInstance& instance, std::size_t arm, Stream& stream);

/// (y - low) / (high - low). Values outside [low, high] are clamped and a
/// warning is logged; high <= low throws ConfigError.
double rescale_reward(double y, double low, double high);

BanditInstance generate_problem(const ProblemGenSpec& spec, Stream& stream);

/// Plain-text record, one arm per line: `<mean> <family> [family params]`.
/// Lines starting with '#' are comments.
void write_instance(std::ostream& out, const BanditInstance& instance);
BanditInstance read_instance(std::istream& in);

}  // namespace phe
