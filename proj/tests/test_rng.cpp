#include <doctest.h>

#include <unordered_set>

#include "phe/rng.hpp"
#include "stats.hpp"

using namespace phe;

TEST_CASE("derived streams are a pure function of the seed") {
  const SeedSpec seed{.master_seed = 42, .problem_index = 3, .run_index = 1, .round_index = std::nullopt};
  Stream a = derive_stream(seed);
  Stream b = derive_stream(seed);
  for (int i = 0; i < 1000; ++i) REQUIRE(a() == b());
}

TEST_CASE("neighbouring seeds give different streams") {
  std::vector<SeedSpec> seeds;
  for (std::uint64_t m = 0; m < 3; ++m) {
    for (std::uint64_t p = 0; p < 3; ++p) {
      for (std::uint64_t r = 0; r < 3; ++r) {
        seeds.push_back({.master_seed = m, .problem_index = p, .run_index = r, .round_index = std::nullopt});
      }
    }
  }
  seeds.push_back({.master_seed = 0, .problem_index = 0, .run_index = 0, .round_index = 0});
  seeds.push_back({.master_seed = 0, .problem_index = 0, .run_index = 0, .round_index = 1});
  std::unordered_set<std::uint64_t> first_words;
  for (const auto& s : seeds) first_words.insert(derive_stream(s)());
  CHECK(first_words.size() == seeds.size());
}

TEST_CASE("no repeats in the first million words of a stream") {
  Stream s = derive_stream({.master_seed = 7, .problem_index = 0, .run_index = 0, .round_index = std::nullopt});
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) seen.insert(s());
  CHECK(seen.size() == 1'000'000);
}

TEST_CASE("substreams are independent of the parent position") {
  Stream parent(123);
  const Stream child_before = parent.substream(1);
  parent();
  parent();
  Stream c1 = child_before;
  Stream c2 = parent.substream(1);
  CHECK(c1() == c2());
  CHECK(parent.substream(0)() != parent.substream(1)());
}

TEST_CASE("uniform doubles lie in [0, 1) and below() is unbiased") {
  Stream s(99);
  for (int i = 0; i < 100'000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = s.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
  }
  std::vector<std::int64_t> counts(7, 0);
  for (int i = 0; i < 70'000; ++i) ++counts[s.below(7)];
  const auto r = testing::chi_squared_test(counts, std::vector<double>(7, 1.0 / 7.0));
  CHECK(r.p_value > 1e-3);
}

TEST_CASE("uniform passes Kolmogorov-Smirnov") {
  Stream s(2024);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = s.uniform();
  CHECK(testing::ks_p_value(xs, [](double x) { return x; }) > 1e-3);
}
