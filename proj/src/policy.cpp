#include "phe/policy.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "phe/distributions.hpp"
#include "phe/errors.hpp"

namespace phe {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

void validate(const PolicySpec& spec) {
  std::visit(Overloaded{
                 [](const PheSpec& s) {
                   if (!(s.a > 0.0)) throw UsageError(fmt::format("PHE needs a > 0, got {}", s.a));
                 },
                 [](const Ucb1Spec&) {},
                 [](const KlUcbSpec& s) {
                   if (!(s.bisect_tol > 0.0)) {
                     throw UsageError(fmt::format("KL-UCB needs bisect_tol > 0, got {}", s.bisect_tol));
                   }
                   if (s.max_iter < 1) throw UsageError("KL-UCB needs max_iter >= 1");
                 },
                 [](const ThompsonSpec&) {},
                 [](const GiroSpec& s) {
                   if (!(s.a > 0.0)) throw UsageError(fmt::format("Giro needs a > 0, got {}", s.a));
                 },
                 [](const FplSpec& s) {
                   if (!(s.learning_rate_scale > 0.0)) {
                     throw UsageError("FPL needs learning_rate_scale > 0");
                   }
                   if (s.resample_cap && *s.resample_cap < 1) {
                     throw UsageError(fmt::format("FPL needs resample_cap >= 1, got {}", *s.resample_cap));
                   }
                 },
             },
             spec);
}

std::string_view policy_kind(const PolicySpec& spec) {
  return std::visit(Overloaded{
                        [](const PheSpec&) { return std::string_view("phe"); },
                        [](const Ucb1Spec&) { return std::string_view("ucb1"); },
                        [](const KlUcbSpec&) { return std::string_view("klucb"); },
                        [](const ThompsonSpec&) { return std::string_view("ts"); },
                        [](const GiroSpec&) { return std::string_view("giro"); },
                        [](const FplSpec&) { return std::string_view("fpl"); },
                    },
                    spec);
}

std::string default_label(const PolicySpec& spec) {
  return std::visit(Overloaded{
                        [](const PheSpec& s) { return fmt::format("PHE(a={})", s.a); },
                        [](const Ucb1Spec&) { return std::string("UCB1"); },
                        [](const KlUcbSpec&) { return std::string("KL-UCB"); },
                        [](const ThompsonSpec&) { return std::string("TS"); },
                        [](const GiroSpec& s) { return fmt::format("Giro(a={})", s.a); },
                        [](const FplSpec&) { return std::string("FPL"); },
                    },
                    spec);
}

// -- Index computations -------------------------------------------------------

std::int64_t pseudo_reward_count(std::int64_t s, double a) {
  return ceil_tolerant(a * static_cast<double>(s));
}

std::int64_t phe_pseudo_sum(std::int64_t s, double a, Stream& stream) {
  if (s < 1) throw UsageError("pseudo-rewards are only drawn for pulled arms");
  return sample_binomial({pseudo_reward_count(s, a), 0.5}, stream);
}

double phe_estimate(const ArmState& state, std::int64_t pseudo_sum, double a) {
  if (state.pulls < 1) throw UsageError("unpulled arm has no perturbed estimate; use kUnpulled");
  const std::int64_t count = pseudo_reward_count(state.pulls, a);
  if (pseudo_sum < 0 || pseudo_sum > count) {
    throw UsageError(fmt::format("pseudo-reward sum {} outside [0, {}]", pseudo_sum, count));
  }
  return (state.reward_sum + static_cast<double>(pseudo_sum)) /
         static_cast<double>(state.pulls + count);
}

std::size_t select_arm(std::span<const double> indices, Stream& stream) {
  if (indices.empty()) throw UsageError("select_arm needs at least one arm");
  std::size_t chosen = 0;
  double best = indices[0];
  std::uint64_t ties = 1;
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] > best) {
      best = indices[i];
      chosen = i;
      ties = 1;
    } else if (indices[i] == best) {
      // Reservoir sampling keeps each maximizer with probability 1 / ties.
      ++ties;
      if (stream.below(ties) == 0) chosen = i;
    }
  }
  return chosen;
}

double ucb1_index(const ArmState& state, double t) {
  if (state.pulls < 1) return kUnpulled;
  const auto s = static_cast<double>(state.pulls);
  return state.reward_sum / s + std::sqrt(2.0 * std::log(t) / s);
}

double bernoulli_kl(double p, double q) {
  constexpr double eps = 1e-15;
  q = std::clamp(q, eps, 1.0 - eps);
  double kl = 0.0;
  if (p > 0.0) kl += p * std::log(p / q);
  if (p < 1.0) kl += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  return kl;
}

double klucb_index(const ArmState& state, double t, double tol, int max_iter) {
  if (state.pulls < 1) return kUnpulled;
  const double mean = std::clamp(state.empirical_mean(), 0.0, 1.0);
  if (mean >= 1.0) return 1.0;
  const double budget = std::log(t) / static_cast<double>(state.pulls);
  if (budget <= 0.0) return mean;
  double lo = mean;
  double hi = 1.0;
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (bernoulli_kl(mean, mid) <= budget) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double thompson_sample(double successes, double failures, Stream& stream) {
  if (successes < 0.0 || failures < 0.0) throw UsageError("posterior counts must be nonnegative");
  return sample_beta(1.0 + successes, 1.0 + failures, stream);
}

double binarize(double y, Stream& stream) { return sample_bernoulli(y, stream) ? 1.0 : 0.0; }

double giro_estimate(std::span<const double> history, double a, bool exact_multinomial, Stream& stream) {
  if (history.empty()) return kUnpulled;
  const auto s = static_cast<std::int64_t>(history.size());
  const std::int64_t pseudo = pseudo_reward_count(s, a);
  const std::int64_t total = s + 2 * pseudo;
  double sum = 0.0;
  if (exact_multinomial) {
    for (std::int64_t draw = 0; draw < total; ++draw) {
      const auto idx = static_cast<std::int64_t>(stream.below(static_cast<std::uint64_t>(total)));
      if (idx < s) {
        sum += history[static_cast<std::size_t>(idx)];
      } else if (idx < s + pseudo) {
        sum += 1.0;
      }
    }
  } else {
    const std::int64_t real_draws =
        sample_binomial({total, static_cast<double>(s) / static_cast<double>(total)}, stream);
    const std::int64_t ones = sample_binomial({total - real_draws, 0.5}, stream);
    for (std::int64_t draw = 0; draw < real_draws; ++draw) {
      sum += history[static_cast<std::size_t>(stream.below(static_cast<std::uint64_t>(s)))];
    }
    sum += static_cast<double>(ones);
  }
  return sum / static_cast<double>(total);
}

double fpl_learning_rate(double scale, std::size_t num_arms, double t) {
  const auto k = static_cast<double>(num_arms);
  return scale * std::sqrt(std::log(k) / (t * k));
}

std::int64_t fpl_default_resample_cap(std::size_t num_arms, double learning_rate) {
  if (!(learning_rate > 0.0)) return kFplMaxResampleCap;
  const double cap = std::ceil(static_cast<double>(num_arms) / learning_rate);
  if (cap >= static_cast<double>(kFplMaxResampleCap)) return kFplMaxResampleCap;
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(cap));
}

// -- Policy driver ------------------------------------------------------------

Policy::Policy(std::size_t num_arms) : arms_(num_arms), indices_(num_arms, kUnpulled) {
  if (num_arms == 0) throw UsageError("a policy needs at least one arm");
}

std::size_t Policy::select(std::int64_t t, Stream& stream) {
  if (t < 1) throw UsageError(fmt::format("rounds are 1-based, got t={}", t));
  compute_indices(t, stream, indices_);
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].pulls == 0) indices_[i] = kUnpulled;
  }
  return select_arm(indices_, stream);
}

void Policy::update(std::size_t arm, double reward, Stream& stream) {
  if (arm >= arms_.size()) {
    throw UsageError(fmt::format("arm {} out of range for {} arms", arm, arms_.size()));
  }
  if (!(reward >= 0.0 && reward <= 1.0)) {
    throw ContractViolation(fmt::format("reward {} outside [0, 1]", reward));
  }
  observe(arm, reward, stream);
}

void Policy::observe(std::size_t arm, double reward, Stream&) { arms_[arm].record(reward); }

PhePolicy::PhePolicy(std::size_t num_arms, PheSpec spec) : Policy(num_arms), spec_(spec) {
  validate(spec_);
}

void PhePolicy::compute_indices(std::int64_t, Stream& stream, std::span<double> out) {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const ArmState& arm = arms_[i];
    if (arm.pulls == 0) continue;
    const std::int64_t pseudo = phe_pseudo_sum(arm.pulls, spec_.a, stream);
    ++pseudo_draws_;
    out[i] = phe_estimate(arm, pseudo, spec_.a);
  }
}

void Ucb1Policy::compute_indices(std::int64_t t, Stream&, std::span<double> out) {
  const auto td = static_cast<double>(t);
  for (std::size_t i = 0; i < arms_.size(); ++i) out[i] = ucb1_index(arms_[i], td);
}

KlUcbPolicy::KlUcbPolicy(std::size_t num_arms, KlUcbSpec spec) : Policy(num_arms), spec_(spec) {
  validate(spec_);
}

void KlUcbPolicy::compute_indices(std::int64_t t, Stream&, std::span<double> out) {
  const auto td = static_cast<double>(t);
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    out[i] = klucb_index(arms_[i], td, spec_.bisect_tol, spec_.max_iter);
  }
}

void KlUcbPolicy::observe(std::size_t arm, double reward, Stream& stream) {
  arms_[arm].record(binarize(reward, stream));
}

void ThompsonPolicy::compute_indices(std::int64_t, Stream& stream, std::span<double> out) {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const ArmState& arm = arms_[i];
    if (arm.pulls == 0) continue;
    out[i] = thompson_sample(arm.reward_sum, static_cast<double>(arm.pulls) - arm.reward_sum, stream);
  }
}

void ThompsonPolicy::observe(std::size_t arm, double reward, Stream& stream) {
  arms_[arm].record(binarize(reward, stream));
}

GiroPolicy::GiroPolicy(std::size_t num_arms, GiroSpec spec)
    : Policy(num_arms), spec_(spec), histories_(num_arms) {
  validate(spec_);
}

void GiroPolicy::compute_indices(std::int64_t, Stream& stream, std::span<double> out) {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].pulls == 0) continue;
    out[i] = giro_estimate(histories_[i], spec_.a, spec_.exact_multinomial, stream);
  }
}

void GiroPolicy::observe(std::size_t arm, double reward, Stream&) {
  arms_[arm].record(reward);
  histories_[arm].push_back(reward);
}

FplPolicy::FplPolicy(std::size_t num_arms, FplSpec spec)
    : Policy(num_arms), spec_(spec), loss_estimates_(num_arms, 0.0) {
  validate(spec_);
}

void FplPolicy::compute_indices(std::int64_t t, Stream& stream, std::span<double> out) {
  learning_rate_ = fpl_learning_rate(spec_.learning_rate_scale, arms_.size(), static_cast<double>(t));
  // argmin(eta * L - Z) == argmax(Z - eta * L)
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    out[i] = sample_exponential(stream) - learning_rate_ * loss_estimates_[i];
  }
}

std::size_t FplPolicy::perturbed_leader(Stream& stream) const {
  std::size_t leader = 0;
  double best = -INFINITY;
  for (std::size_t i = 0; i < loss_estimates_.size(); ++i) {
    const double score = sample_exponential(stream) - learning_rate_ * loss_estimates_[i];
    if (score > best) {
      best = score;
      leader = i;
    }
  }
  return leader;
}

void FplPolicy::observe(std::size_t arm, double reward, Stream& stream) {
  const bool initial_pull = arms_[arm].pulls == 0;
  arms_[arm].record(reward);
  std::int64_t resamples = 1;
  if (!initial_pull) {
    const std::int64_t cap =
        spec_.resample_cap.value_or(fpl_default_resample_cap(arms_.size(), learning_rate_));
    // Geometric resampling: count redraws until the pulled arm leads again.
    resamples = cap;
    for (std::int64_t k = 1; k <= cap; ++k) {
      if (perturbed_leader(stream) == arm) {
        resamples = k;
        break;
      }
    }
  }
  last_resample_count_ = resamples;
  loss_estimates_[arm] += (1.0 - reward) * static_cast<double>(resamples);
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::size_t num_arms) {
  validate(spec);
  return std::visit(
      Overloaded{
          [&](const PheSpec& s) -> std::unique_ptr<Policy> { return std::make_unique<PhePolicy>(num_arms, s); },
          [&](const Ucb1Spec&) -> std::unique_ptr<Policy> { return std::make_unique<Ucb1Policy>(num_arms); },
          [&](const KlUcbSpec& s) -> std::unique_ptr<Policy> { return std::make_unique<KlUcbPolicy>(num_arms, s); },
          [&](const ThompsonSpec&) -> std::unique_ptr<Policy> { return std::make_unique<ThompsonPolicy>(num_arms); },
          [&](const GiroSpec& s) -> std::unique_ptr<Policy> { return std::make_unique<GiroPolicy>(num_arms, s); },
          [&](const FplSpec& s) -> std::unique_ptr<Policy> { return std::make_unique<FplPolicy>(num_arms, s); },
      },
      spec);
}

}  // namespace phe
