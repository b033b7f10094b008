#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "phe/errors.hpp"
#include "phe/policy.hpp"
#include "stats.hpp"

using namespace phe;

TEST_CASE("pseudo-reward count is ceil(a s)") {
  CHECK(pseudo_reward_count(10, 1.1) == 11);
  CHECK(pseudo_reward_count(10, 2.1) == 21);
  CHECK(pseudo_reward_count(3, 0.5) == 2);
  CHECK(pseudo_reward_count(1, 2.1) == 3);
  CHECK(pseudo_reward_count(7, 1.0) == 7);
  CHECK(pseudo_reward_count(100, 0.07) == 7);
}

TEST_CASE("perturbed estimate") {
  const ArmState arm{4, 2.0};
  CHECK(phe_estimate(arm, 3, 1.0) == doctest::Approx(5.0 / 8.0));
  CHECK_THROWS_AS(phe_estimate(ArmState{}, 0, 1.0), UsageError);
  CHECK_THROWS_AS(phe_estimate(arm, 5, 1.0), UsageError);
  CHECK_THROWS_AS(phe_estimate(arm, -1, 1.0), UsageError);
  Stream s(0);
  CHECK_THROWS_AS(phe_pseudo_sum(0, 1.0, s), UsageError);
}

TEST_CASE("perturbed estimate mean and variance") {
  // E = (V + P/2) / (s + P), Var = (P/4) / (s + P)^2 with P = ceil(a s).
  struct Case {
    std::int64_t s;
    double v, a;
  };
  for (const Case c : {Case{10, 7.0, 1.0}, Case{10, 7.0, 2.0}, Case{9, 2.5, 1.1}, Case{40, 31.0, 0.5}}) {
    const double p = static_cast<double>(pseudo_reward_count(c.s, c.a));
    const double total = static_cast<double>(c.s) + p;
    const double mean = (c.v + p / 2.0) / total;
    // With a s integral this is (V/s + a/2) / (1 + a).
    if (std::abs(c.a * c.s - p) < 1e-9) {
      CHECK(mean == doctest::Approx((c.v / c.s + c.a / 2.0) / (1.0 + c.a)));
    }
    const double var = (p / 4.0) / (total * total);
    Stream s(c.s);
    const ArmState arm{c.s, c.v};
    double sum = 0.0, sq = 0.0;
    constexpr int draws = 100'000;
    for (int i = 0; i < draws; ++i) {
      const double x = phe_estimate(arm, phe_pseudo_sum(c.s, c.a, s), c.a);
      sum += x;
      sq += x * x;
    }
    const double m = sum / draws;
    CHECK(std::abs(m - mean) < 5.0 * std::sqrt(var / draws));
    CHECK(sq / draws - m * m == doctest::Approx(var).epsilon(0.03));
    // Bernoulli(1/2) pseudo-rewards carry the maximal variance kSigmaMaxSq each.
    CHECK(sq / draws - m * m <= 1.05 * kSigmaMaxSq * p / (total * total));
  }
}

TEST_CASE("select_arm picks the maximum") {
  Stream s(1);
  const std::vector<double> idx = {0.1, 0.9, 0.3};
  CHECK(select_arm(idx, s) == 1);
  CHECK_THROWS_AS(select_arm(std::vector<double>{}, s), UsageError);
  const std::vector<double> with_inf = {0.5, kUnpulled, 2.0};
  CHECK(select_arm(with_inf, s) == 1);
}

TEST_CASE("select_arm is invariant to increasing transforms") {
  Stream gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> idx(6);
    for (auto& x : idx) x = std::floor(gen.uniform() * 4.0) / 4.0;  // plenty of ties
    std::vector<double> transformed(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) transformed[i] = std::exp(3.0 * idx[i]) + 7.0;
    Stream a(trial), b(trial);
    REQUIRE(select_arm(idx, a) == select_arm(transformed, b));
  }
}

TEST_CASE("ties are broken uniformly") {
  const std::vector<double> idx = {1.0, 3.0, 3.0, 0.0, 3.0};
  Stream s(8);
  std::vector<std::int64_t> counts(5, 0);
  for (int i = 0; i < 100'000; ++i) ++counts[select_arm(idx, s)];
  CHECK(counts[0] == 0);
  CHECK(counts[3] == 0);
  const auto r = testing::chi_squared_test({counts[1], counts[2], counts[4]}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(r.p_value > 1e-3);
}

TEST_CASE("UCB1 index") {
  CHECK(ucb1_index(ArmState{4, 3.0}, 10.0) == doctest::Approx(0.75 + std::sqrt(2.0 * std::log(10.0) / 4.0)));
  CHECK(ucb1_index(ArmState{}, 10.0) == kUnpulled);
}

TEST_CASE("KL-UCB index") {
  CHECK(bernoulli_kl(0.5, 0.5) == doctest::Approx(0.0));
  CHECK(bernoulli_kl(0.0, 1.0 - std::exp(-1.0)) == doctest::Approx(1.0));
  // s KL(0, q) = log t with s = 1, t = e gives q = 1 - 1/e.
  CHECK(klucb_index(ArmState{1, 0.0}, std::exp(1.0), 1e-9, 64) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-8));
  CHECK(std::abs(klucb_index(ArmState{1, 0.0}, std::exp(1.0), 1e-6) - (1.0 - std::exp(-1.0))) <= 1e-6);
  CHECK(klucb_index(ArmState{3, 3.0}, 100.0, 1e-6) == 1.0);
  const double q = klucb_index(ArmState{10, 4.0}, 50.0, 1e-9, 64);
  CHECK(q > 0.4);
  CHECK(10.0 * bernoulli_kl(0.4, q) <= std::log(50.0) + 1e-9);
}

TEST_CASE("Thompson posterior draws") {
  Stream s(12);
  double sum = 0.0;
  for (int i = 0; i < 100'000; ++i) sum += thompson_sample(3.0, 1.0, s);
  CHECK(sum / 100'000 == doctest::Approx(4.0 / 6.0).epsilon(0.01));
  CHECK_THROWS_AS(thompson_sample(-1.0, 1.0, s), UsageError);
}

TEST_CASE("binarize keeps the mean") {
  Stream s(13);
  double sum = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const double b = binarize(0.37, s);
    REQUIRE((b == 0.0 || b == 1.0));
    sum += b;
  }
  CHECK(std::abs(sum / 100'000 - 0.37) < 0.01);
}

TEST_CASE("Giro bootstrap matches the 27-outcome enumeration at s = 1") {
  // History {y} plus one pseudo-one and one pseudo-zero; three draws with
  // replacement give 27 equally likely index triples.
  const double y = 0.4;
  // Outcome key: 4 * (#y draws) + 10 * (#one draws) is unique.
  std::map<int, double> exact;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; k < 3; ++k) {
        const int ys = (i == 0) + (j == 0) + (k == 0);
        const int ones = (i == 1) + (j == 1) + (k == 1);
        exact[4 * ys + 10 * ones] += 1.0 / 27.0;
      }
    }
  }
  REQUIRE(exact.size() == 10);
  const std::vector<double> history = {y};
  for (const bool exact_multinomial : {true, false}) {
    CAPTURE(exact_multinomial);
    Stream s(exact_multinomial ? 21 : 22);
    std::map<int, std::int64_t> seen;
    for (int i = 0; i < 100'000; ++i) {
      const double mean = giro_estimate(history, 1.0, exact_multinomial, s);
      // 3 * mean = 0.4 ys + ones, so 10 * 3 * mean = 4 ys + 10 ones.
      ++seen[static_cast<int>(std::lround(30.0 * mean))];
    }
    std::vector<std::int64_t> counts;
    std::vector<double> probs;
    for (const auto& [key, p] : exact) {
      counts.push_back(seen.count(key) ? seen[key] : 0);
      probs.push_back(p);
    }
    std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    CHECK(total == 100'000);
    CHECK(testing::chi_squared_test(counts, probs).p_value > 1e-3);
  }
  Stream s(0);
  CHECK(giro_estimate(std::vector<double>{}, 1.0, true, s) == kUnpulled);
}

TEST_CASE("FPL learning rate and resampling cap") {
  CHECK(fpl_learning_rate(1.0, 10, 100.0) == doctest::Approx(std::sqrt(std::log(10.0) / 1000.0)));
  CHECK(fpl_learning_rate(2.0, 5, 1.0) == doctest::Approx(2.0 * std::sqrt(std::log(5.0) / 5.0)));
  CHECK(fpl_default_resample_cap(10, 0.5) == 20);
  CHECK(fpl_default_resample_cap(10, 1e-6) == kFplMaxResampleCap);
  CHECK(fpl_default_resample_cap(10, 0.0) == kFplMaxResampleCap);
}

TEST_CASE("FPL initial pulls use a single resample") {
  FplPolicy policy(3, FplSpec{});
  Stream s(4);
  for (std::int64_t t = 1; t <= 3; ++t) {
    const auto arm = policy.select(t, s);
    policy.update(arm, 0.25, s);
    CHECK(policy.last_resample_count() == 1);
    CHECK(policy.loss_estimates()[arm] == doctest::Approx(0.75));
  }
  const auto arm = policy.select(4, s);
  policy.update(arm, 0.0, s);
  CHECK(policy.last_resample_count() >= 1);
  CHECK(policy.last_resample_count() <= fpl_default_resample_cap(3, fpl_learning_rate(1.0, 3, 4.0)));
}

TEST_CASE("every policy pulls each arm once before anything else") {
  const std::vector<PolicySpec> specs = {PheSpec{1.1}, Ucb1Spec{},    KlUcbSpec{},
                                         ThompsonSpec{}, GiroSpec{1.0}, FplSpec{}};
  for (const auto& spec : specs) {
    CAPTURE(default_label(spec));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto policy = make_policy(spec, 7);
      Stream s(seed);
      std::set<std::size_t> first;
      for (std::int64_t t = 1; t <= 7; ++t) {
        const auto arm = policy->select(t, s);
        first.insert(arm);
        policy->update(arm, t % 2 ? 1.0 : 0.0, s);
      }
      CHECK(first.size() == 7);
    }
  }
}

TEST_CASE("policy contract checks") {
  auto policy = make_policy(PheSpec{1.1}, 3);
  Stream s(0);
  CHECK_THROWS_AS(policy->update(0, 1.5, s), ContractViolation);
  CHECK_THROWS_AS(policy->update(0, -0.1, s), ContractViolation);
  CHECK_THROWS_AS(policy->update(0, std::nan(""), s), ContractViolation);
  CHECK_THROWS_AS(policy->update(5, 0.5, s), UsageError);
  CHECK_THROWS_AS(policy->select(0, s), UsageError);
  CHECK_THROWS_AS(make_policy(PheSpec{0.0}, 3), UsageError);
  CHECK_THROWS_AS(make_policy(PheSpec{1.0}, 0), UsageError);
  CHECK_THROWS_AS(validate(GiroSpec{-1.0}), UsageError);
  CHECK_THROWS_AS(validate(FplSpec{1.0, 0}), UsageError);
  CHECK_THROWS_AS(validate(KlUcbSpec{0.0, 64}), UsageError);
}

TEST_CASE("PHE draws one pseudo-sum per pulled arm per round") {
  PhePolicy policy(4, PheSpec{1.1});
  Stream s(2);
  std::int64_t expected = 0;
  for (std::int64_t t = 1; t <= 50; ++t) {
    std::int64_t pulled = 0;
    for (const auto& arm : policy.arms()) pulled += arm.pulls > 0;
    expected += pulled;
    const auto arm = policy.select(t, s);
    policy.update(arm, 0.5, s);
  }
  CHECK(policy.pseudo_draws() == expected);
}

TEST_CASE("labels and kinds") {
  CHECK(default_label(PheSpec{1.1}) == "PHE(a=1.1)");
  CHECK(default_label(GiroSpec{1.0}) == "Giro(a=1)");
  CHECK(policy_kind(KlUcbSpec{}) == "klucb");
  CHECK(policy_kind(ThompsonSpec{}) == "ts");
}
