#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "phe/rng.hpp"

namespace phe {

/// Maximum variance of a [0, 1] random variable; Bernoulli(1/2) attains it.
inline constexpr double kSigmaMaxSq = 0.25;

/// Index of an arm that has never been pulled. It beats every finite index,
/// which realizes the pull-each-arm-once initialization.
inline constexpr double kUnpulled = std::numeric_limits<double>::infinity();

/// Sufficient statistics of one arm: pull count s and reward sum V.
struct ArmState {
  std::int64_t pulls = 0;
  double reward_sum = 0.0;

  void record(double reward) noexcept {
    ++pulls;
    reward_sum += reward;
  }
  double empirical_mean() const noexcept {
    return pulls > 0 ? reward_sum / static_cast<double>(pulls) : 0.0;
  }
};

// -- Policy parameters --------------------------------------------------------

struct PheSpec {
  double a = 1.1;
};
struct Ucb1Spec {};
struct KlUcbSpec {
  double bisect_tol = 1e-6;
  int max_iter = 64;
};
struct ThompsonSpec {};
struct GiroSpec {
  double a = 1.0;
  /// true: draw every bootstrap index individually. false: draw how many
  /// indices land on real rewards, pseudo-ones and pseudo-zeros with binomials
  /// and resample only the real part. Both are exact.
  bool exact_multinomial = true;
};
struct FplSpec {
  double learning_rate_scale = 1.0;
  /// Empty means ceil(K / eta_t), capped at kFplMaxResampleCap.
  std::optional<std::int64_t> resample_cap;
};

inline constexpr std::int64_t kFplMaxResampleCap = 10'000;

using PolicySpec = std::variant<PheSpec, Ucb1Spec, KlUcbSpec, ThompsonSpec, GiroSpec, FplSpec>;

/// Throws UsageError when a hyperparameter is out of range.
void validate(const PolicySpec& spec);
/// Short type tag used in config files: phe, ucb1, klucb, ts, giro, fpl.
std::string_view policy_kind(const PolicySpec& spec);
/// Human-readable default label, e.g. "PHE(a=1.1)".
std::string default_label(const PolicySpec& spec);

// -- Index computations -------------------------------------------------------

/// Number of pseudo-rewards added after s pulls: ceil(a * s).
std::int64_t pseudo_reward_count(std::int64_t s, double a);

/// Sum of ceil(a * s) fresh Bernoulli(1/2) pseudo-rewards.
std::int64_t phe_pseudo_sum(std::int64_t s, double a, Stream& stream);

/// Mean of the perturbed history, (V + U) / (s + ceil(a * s)).
double phe_estimate(const ArmState& state, std::int64_t pseudo_sum, double a);

/// An index attaining the maximum; ties are broken uniformly at random.
std::size_t select_arm(std::span<const double> indices, Stream& stream);

double ucb1_index(const ArmState& state, double t);

double bernoulli_kl(double p, double q);
double klucb_index(const ArmState& state, double t, double tol, int max_iter = 64);

/// Draw from the Beta(1 + successes, 1 + failures) posterior.
double thompson_sample(double successes, double failures, Stream& stream);
/// Bernoulli(y) draw, used to feed [0, 1] rewards to Bernoulli-model policies.
double binarize(double y, Stream& stream);

/// Mean of a bootstrap resample of `history` augmented with ceil(a * s) ones
/// and ceil(a * s) zeros. Returns kUnpulled for an empty history.
double giro_estimate(std::span<const double> history, double a, bool exact_multinomial, Stream& stream);

double fpl_learning_rate(double scale, std::size_t num_arms, double t);
std::int64_t fpl_default_resample_cap(std::size_t num_arms, double learning_rate);

// -- Policies -----------------------------------------------------------------

/// Common driver: each round computes one index per arm, unpulled arms get
/// kUnpulled, and the argmax is pulled. update() touches only the pulled arm.
class Policy {
 public:
  explicit Policy(std::size_t num_arms);
  virtual ~Policy() = default;

  Policy(const Policy&) = delete;
  Policy& operator=(const Policy&) = delete;

  /// Arm to pull in round t (1-based).
  virtual std::size_t select(std::int64_t t, Stream& stream);
  /// Feed back the reward of the arm pulled this round.
  /// Throws ContractViolation when reward is outside [0, 1].
  void update(std::size_t arm, double reward, Stream& stream);

  std::size_t num_arms() const noexcept { return arms_.size(); }
  std::span<const ArmState> arms() const noexcept { return arms_; }
  /// Indices computed by the most recent select().
  std::span<const double> last_indices() const noexcept { return indices_; }

 protected:
  /// Fill `out[i]` for every arm with arms()[i].pulls > 0; other slots are
  /// overwritten with kUnpulled afterwards.
  virtual void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) = 0;
  /// Default records the raw reward into the arm's state.
  virtual void observe(std::size_t arm, double reward, Stream& stream);

  std::vector<ArmState> arms_;

 private:
  std::vector<double> indices_;
};

class PhePolicy final : public Policy {
 public:
  PhePolicy(std::size_t num_arms, PheSpec spec);
  /// Binomial pseudo-reward draws made so far.
  std::int64_t pseudo_draws() const noexcept { return pseudo_draws_; }

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;

 private:
  PheSpec spec_;
  std::int64_t pseudo_draws_ = 0;
};

class Ucb1Policy final : public Policy {
 public:
  using Policy::Policy;

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;
};

class KlUcbPolicy final : public Policy {
 public:
  KlUcbPolicy(std::size_t num_arms, KlUcbSpec spec);

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;
  void observe(std::size_t arm, double reward, Stream& stream) override;

 private:
  KlUcbSpec spec_;
};

class ThompsonPolicy final : public Policy {
 public:
  using Policy::Policy;

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;
  void observe(std::size_t arm, double reward, Stream& stream) override;
};

class GiroPolicy final : public Policy {
 public:
  GiroPolicy(std::size_t num_arms, GiroSpec spec);

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;
  void observe(std::size_t arm, double reward, Stream& stream) override;

 private:
  GiroSpec spec_;
  std::vector<std::vector<double>> histories_;
};

/// Follow the perturbed leader on losses 1 - reward, with exponential noise
/// and geometric resampling for the importance weights.
class FplPolicy final : public Policy {
 public:
  FplPolicy(std::size_t num_arms, FplSpec spec);

  std::span<const double> loss_estimates() const noexcept { return loss_estimates_; }
  /// Resample count G used by the most recent update.
  std::int64_t last_resample_count() const noexcept { return last_resample_count_; }

 protected:
  void compute_indices(std::int64_t t, Stream& stream, std::span<double> out) override;
  void observe(std::size_t arm, double reward, Stream& stream) override;

 private:
  std::size_t perturbed_leader(Stream& stream) const;

  FplSpec spec_;
  std::vector<double> loss_estimates_;
  double learning_rate_ = 0.0;
  std::int64_t last_resample_count_ = 0;
};

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::size_t num_arms);

}  // namespace phe
