#include "phe/environment.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "phe/distributions.hpp"
#include "phe/errors.hpp"
#include "phe/log.hpp"

namespace phe {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_family(const RewardFamily& family) {
  if (const auto* beta = std::get_if<BetaFamily>(&family); beta && !(beta->v > 0.0)) {
    throw ConfigError(fmt::format("beta family needs v > 0, got {}", beta->v));
  }
  if (const auto* r = std::get_if<RescaledFamily>(&family); r && !(r->high > r->low)) {
    throw ConfigError(fmt::format("rescaled family needs high > low, got [{}, {}]", r->low, r->high));
  }
}

}  // namespace

std::string family_name(const RewardFamily& family) {
  return std::visit(Overloaded{
                        [](const BernoulliFamily&) { return std::string("bernoulli"); },
                        [](const BetaFamily& f) { return fmt::format("beta(v={})", f.v); },
                        [](const RescaledFamily& f) {
                          return fmt::format("rescaled(m={}, M={})", f.low, f.high);
                        },
                    },
                    family);
}

BanditInstance::BanditInstance(std::vector<double> means, RewardFamily family)
    : means_(std::move(means)), family_(family) {
  if (means_.empty()) throw UsageError("a bandit instance needs at least one arm");
  validate_family(family_);
  const bool beta = std::holds_alternative<BetaFamily>(family_);
  for (std::size_t i = 0; i < means_.size(); ++i) {
    const double mu = means_[i];
    if (!(mu >= 0.0 && mu <= 1.0)) {
      throw UsageError(fmt::format("arm {} mean {} is outside [0, 1]", i, mu));
    }
    if (beta && !(mu > 0.0 && mu < 1.0)) {
      throw UsageError(fmt::format("beta arm {} needs a mean strictly inside (0, 1), got {}", i, mu));
    }
  }
  best_mean_ = *std::max_element(means_.begin(), means_.end());
  gaps_.reserve(means_.size());
  for (double mu : means_) gaps_.push_back(best_mean_ - mu);
}

double BanditInstance::max_gap() const noexcept {
  return *std::max_element(gaps_.begin(), gaps_.end());
}

std::size_t BanditInstance::best_arm() const noexcept {
  return static_cast<std::size_t>(std::max_element(means_.begin(), means_.end()) - means_.begin());
}

std::vector<double> BanditInstance::positive_gaps() const {
  std::vector<double> out;
  for (double g : gaps_) {
    if (g > 0.0) out.push_back(g);
  }
  return out;
}

void ProblemGenSpec::validate() const {
  if (num_arms == 0) throw ConfigError("problem generator needs at least one arm");
  if (!(mean_low >= 0.0 && mean_low <= mean_high && mean_high <= 1.0)) {
    throw ConfigError(
        fmt::format("mean interval must satisfy 0 <= low <= high <= 1, got [{}, {}]", mean_low, mean_high));
  }
  validate_family(family);
}

double pull(const BanditInstance& instance, std::size_t arm, Stream& stream) {
  if (arm >= instance.num_arms()) {
    throw UsageError(fmt::format("arm {} out of range for {} arms", arm, instance.num_arms()));
  }
  const double mu = instance.means()[arm];
  return std::visit(Overloaded{
                        [&](const BernoulliFamily&) { return sample_bernoulli(mu, stream) ? 1.0 : 0.0; },
                        [&](const BetaFamily& f) { return sample_beta(f.v * mu, f.v * (1.0 - mu), stream); },
                        [&](const RescaledFamily& f) {
                          const double half_width = std::min(mu, 1.0 - mu);
                          const double x = mu + (2.0 * stream.uniform() - 1.0) * half_width;
                          return rescale_reward(f.low + (f.high - f.low) * x, f.low, f.high);
                        },
                    },
                    instance.family());
}

double rescale_reward(double y, double low, double high) {
  if (!(high > low)) {
    throw ConfigError(fmt::format("reward range needs M > m, got m={} M={}", low, high));
  }
  const double scaled = (y - low) / (high - low);
  if (scaled >= 0.0 && scaled <= 1.0) return scaled;
  // Rounding in low + (high - low) * x can land a hair outside; only real
  // excursions are worth a warning.
  if (scaled < -1e-12 || scaled > 1.0 + 1e-12) {
    log_warning(fmt::format("reward {} outside [{}, {}], clamped", y, low, high));
  }
  return std::clamp(scaled, 0.0, 1.0);
}

BanditInstance generate_problem(const ProblemGenSpec& spec, Stream& stream) {
  spec.validate();
  std::vector<double> means(spec.num_arms);
  const double width = spec.mean_high - spec.mean_low;
  for (double& mu : means) mu = spec.mean_low + width * stream.uniform();
  if (std::holds_alternative<BetaFamily>(spec.family)) {
    // Keep beta shapes positive even when the interval touches 0 or 1.
    for (double& mu : means) mu = std::clamp(mu, 1e-9, 1.0 - 1e-9);
  }
  return BanditInstance(std::move(means), spec.family);
}

void write_instance(std::ostream& out, const BanditInstance& instance) {
  out << "# mean family [params]\n";
  const std::string suffix = std::visit(
      Overloaded{
          [](const BernoulliFamily&) { return std::string("bernoulli"); },
          [](const BetaFamily& f) { return fmt::format("beta {:.17g}", f.v); },
          [](const RescaledFamily& f) { return fmt::format("rescaled {:.17g} {:.17g}", f.low, f.high); },
      },
      instance.family());
  for (double mu : instance.means()) out << fmt::format("{:.17g} {}\n", mu, suffix);
}

BanditInstance read_instance(std::istream& in) {
  std::vector<double> means;
  std::optional<RewardFamily> family;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double mu = 0.0;
    std::string name;
    if (!(fields >> mu >> name)) {
      throw ConfigError(fmt::format("line {}: expected '<mean> <family> [params]'", line_no));
    }
    RewardFamily parsed;
    if (name == "bernoulli") {
      parsed = BernoulliFamily{};
    } else if (name == "beta") {
      BetaFamily f;
      if (!(fields >> f.v)) throw ConfigError(fmt::format("line {}: beta needs v", line_no));
      parsed = f;
    } else if (name == "rescaled") {
      RescaledFamily f;
      if (!(fields >> f.low >> f.high)) {
        throw ConfigError(fmt::format("line {}: rescaled needs m and M", line_no));
      }
      parsed = f;
    } else {
      throw ConfigError(fmt::format("line {}: unknown family '{}'", line_no, name));
    }
    std::string extra;
    if (fields >> extra) throw ConfigError(fmt::format("line {}: trailing field '{}'", line_no, extra));
    if (family && !(*family == parsed)) {
      throw ConfigError(fmt::format("line {}: all arms must share one family", line_no));
    }
    family = parsed;
    means.push_back(mu);
  }
  if (!family) throw ConfigError("instance record has no arms");
  try {
    return BanditInstance(std::move(means), *family);
  } catch (const UsageError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace phe
