#include "phe/rng.hpp"

namespace phe {

namespace {

constexpr std::uint64_t kProblemSalt = 0x6a09e667f3bcc908ULL;
constexpr std::uint64_t kRunSalt = 0xbb67ae8584caa73bULL;
constexpr std::uint64_t kRoundSalt = 0x3c6ef372fe94f82bULL;
constexpr std::uint64_t kLaneSalt = 0xa54ff53a5f1d36f1ULL;

std::uint64_t combine(std::uint64_t h, std::uint64_t value, std::uint64_t salt) {
  return mix64(h ^ mix64(value + salt));
}

__extension__ using u128 = unsigned __int128;

}  // namespace

std::uint64_t Stream::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection of the biased low region.
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

Stream Stream::substream(std::uint64_t lane) const noexcept {
  return Stream(combine(key_, lane, kLaneSalt));
}

Stream derive_stream(const SeedSpec& seed) noexcept {
  std::uint64_t h = mix64(seed.master_seed);
  h = combine(h, seed.problem_index, kProblemSalt);
  h = combine(h, seed.run_index, kRunSalt);
  if (seed.round_index) h = combine(h, *seed.round_index, kRoundSalt);
  return Stream(h);
}

}  // namespace phe
