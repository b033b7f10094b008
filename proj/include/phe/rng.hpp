#pragma once

#include <cstdint>
#include <limits>
#include <optional>

namespace phe {

/// Identifies one reproducible random stream.
///
/// The stream derived from a SeedSpec is a pure function of its fields, so an
/// experiment can hand every (problem, run) pair its own stream without any
/// dependence on which worker thread happens to execute it.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t problem_index = 0;
  std::uint64_t run_index = 0;
  std::optional<std::uint64_t> round_index;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// 64-bit finalizer from SplitMix64.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: word i of the stream is mix(key + (i+1) * gamma).
///
/// Satisfies UniformRandomBitGenerator. A Stream is single-owner state; give
/// each concurrent worker its own.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Independent child stream; the parent's position is unaffected.
  Stream substream(std::uint64_t lane) const noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t position() const noexcept { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

Stream derive_stream(const SeedSpec& seed) noexcept;

}  // namespace phe
