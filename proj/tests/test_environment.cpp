#include <doctest.h>

#include <cmath>
#include <sstream>

#include "phe/environment.hpp"
#include "phe/errors.hpp"
#include "stats.hpp"

using namespace phe;

TEST_CASE("gaps and best arm") {
  const BanditInstance b({0.2, 0.7, 0.5, 0.7}, BernoulliFamily{});
  CHECK(b.num_arms() == 4);
  CHECK(b.best_mean() == 0.7);
  CHECK(b.gap(0) == doctest::Approx(0.5));
  CHECK(b.gap(1) == 0.0);
  CHECK(b.gap(3) == 0.0);
  CHECK(b.max_gap() == doctest::Approx(0.5));
  CHECK(b.positive_gaps().size() == 2);
  CHECK((b.best_arm() == 1 || b.best_arm() == 3));
}

TEST_CASE("instance validation") {
  CHECK_THROWS_AS(BanditInstance({}, BernoulliFamily{}), UsageError);
  CHECK_THROWS_AS(BanditInstance({0.5, 1.2}, BernoulliFamily{}), UsageError);
  CHECK_THROWS_AS(BanditInstance({0.0, 0.5}, BetaFamily{4.0}), UsageError);
  CHECK_THROWS_AS(BanditInstance({0.5}, BetaFamily{-1.0}), ConfigError);
  CHECK_THROWS_AS(BanditInstance({0.5}, RescaledFamily{2.0, 2.0}), ConfigError);
  CHECK_NOTHROW(BanditInstance({0.0, 1.0}, BernoulliFamily{}));
}

TEST_CASE("pull rejects a bad arm") {
  const BanditInstance b({0.5}, BernoulliFamily{});
  Stream s(0);
  CHECK_THROWS_AS(pull(b, 1, s), UsageError);
}

TEST_CASE("rewards stay in [0, 1] and have the right mean") {
  const std::vector<double> means = {0.05, 0.3, 0.5, 0.81};
  for (const RewardFamily& family :
       {RewardFamily{BernoulliFamily{}}, RewardFamily{BetaFamily{4.0}}, RewardFamily{RescaledFamily{-3.0, 5.0}}}) {
    CAPTURE(family_name(family));
    const BanditInstance b(means, family);
    Stream s(5);
    for (std::size_t arm = 0; arm < means.size(); ++arm) {
      double sum = 0.0;
      constexpr int draws = 100'000;
      for (int i = 0; i < draws; ++i) {
        const double y = pull(b, arm, s);
        REQUIRE(y >= 0.0);
        REQUIRE(y <= 1.0);
        sum += y;
      }
      // Standard error <= 0.5 / sqrt(1e5) ~ 0.0016.
      CHECK(std::abs(sum / draws - means[arm]) < 0.008);
    }
  }
}

TEST_CASE("beta rewards have Beta(v mu, v (1 - mu)) moments") {
  // Mean mu, variance mu (1 - mu) / (v + 1).
  const BanditInstance b({0.3}, BetaFamily{4.0});
  Stream s(11);
  constexpr int draws = 100'000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double y = pull(b, 0, s);
    sum += y;
    sq += y * y;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  CHECK(mean == doctest::Approx(0.3).epsilon(0.01));
  CHECK(var == doctest::Approx(0.3 * 0.7 / 5.0).epsilon(0.03));
}

TEST_CASE("rescale_reward") {
  CHECK(rescale_reward(2.0, 0.0, 4.0) == 0.5);
  CHECK(rescale_reward(-1.0, -1.0, 1.0) == 0.0);
  CHECK(rescale_reward(1.0, -1.0, 1.0) == 1.0);
  CHECK(rescale_reward(7.0, 0.0, 4.0) == 1.0);
  CHECK(rescale_reward(-7.0, 0.0, 4.0) == 0.0);
  CHECK_THROWS_AS(rescale_reward(0.5, 1.0, 1.0), ConfigError);
  CHECK_THROWS_AS(rescale_reward(0.5, 2.0, 1.0), ConfigError);
}

TEST_CASE("generated means lie in the interval and are reproducible") {
  const ProblemGenSpec spec{10, 0.25, 0.75, BernoulliFamily{}};
  Stream s1(9), s2(9);
  const BanditInstance a = generate_problem(spec, s1);
  const BanditInstance b = generate_problem(spec, s2);
  CHECK(a == b);
  for (const double mu : a.means()) {
    CHECK(mu >= 0.25);
    CHECK(mu <= 0.75);
  }
  CHECK_THROWS_AS((ProblemGenSpec{0, 0.2, 0.3, BernoulliFamily{}}.validate()), ConfigError);
  CHECK_THROWS_AS((ProblemGenSpec{3, 0.6, 0.3, BernoulliFamily{}}.validate()), ConfigError);
}

TEST_CASE("instance text round trip") {
  for (const RewardFamily& family :
       {RewardFamily{BernoulliFamily{}}, RewardFamily{BetaFamily{2.5}}, RewardFamily{RescaledFamily{-1.0, 3.0}}}) {
    const BanditInstance b({0.1, 1.0 / 3.0, 0.9}, family);
    std::stringstream text;
    write_instance(text, b);
    CHECK(read_instance(text) == b);
  }
}

TEST_CASE("malformed instance records name the line") {
  std::istringstream bad("# header\n0.5 bernoulli\n0.4 gamma 3\n");
  try {
    read_instance(bad);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream mixed("0.5 bernoulli\n0.4 beta 4\n");
  CHECK_THROWS_AS(read_instance(mixed), ConfigError);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(read_instance(empty), ConfigError);
}
