#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "phe/distributions.hpp"
#include "phe/errors.hpp"
#include "stats.hpp"

using namespace phe;

TEST_CASE("tolerant rounding absorbs floating-point noise") {
  CHECK(1.1 * 50 > 55.0);  // the trap this guards against
  CHECK(ceil_tolerant(1.1 * 50) == 55);
  CHECK(ceil_tolerant(0.07 * 100) == 7);
  CHECK(ceil_tolerant(1.1 * 10) == 11);
  CHECK(ceil_tolerant(2.1 * 10) == 21);
  CHECK(ceil_tolerant(0.5 * 3) == 2);
  CHECK(ceil_tolerant(11.0001) == 12);
  CHECK(ceil_tolerant(-0.5) == 0);
  CHECK(floor_tolerant(0.7 * 10) == 7);
  CHECK(floor_tolerant(6.9999) == 6);
  CHECK(floor_tolerant(-0.5) == -1);
}

TEST_CASE("binomial parameters are validated") {
  CHECK_THROWS_AS((BinomialParams{-1, 0.5}.validate()), UsageError);
  CHECK_THROWS_AS((BinomialParams{3, 1.5}.validate()), UsageError);
  CHECK_NOTHROW((BinomialParams{0, 0.0}.validate()));
}

TEST_CASE("binomial tail matches exact rational values") {
  CHECK(binomial_tail(7, {10, 0.5}) == doctest::Approx(176.0 / 1024.0).epsilon(1e-14));
  CHECK(binomial_tail(2, {4, 0.5}) == doctest::Approx(11.0 / 16.0).epsilon(1e-14));
  CHECK(binomial_tail(60, {100, 0.3}) == doctest::Approx(5.129949815583160690e-10).epsilon(1e-11));
  CHECK(binomial_tail(150, {200, 0.5}) == doctest::Approx(4.196510437802380670e-13).epsilon(1e-11));
  CHECK(binomial_tail(3, {1000, 0.001}) == doctest::Approx(0.08020934284020105353).epsilon(1e-12));
  CHECK(binomial_tail(0, {5, 0.3}) == 1.0);
  CHECK(binomial_tail(-3, {5, 0.3}) == 1.0);
  CHECK(binomial_tail(6, {5, 0.3}) == 0.0);
  CHECK(binomial_tail(1, {5, 0.0}) == 0.0);
  CHECK(binomial_tail(5, {5, 1.0}) == 1.0);
}

TEST_CASE("tail is nonincreasing and complements the cdf") {
  for (const std::int64_t n : {1, 7, 40, 200}) {
    for (const double p : {0.0, 0.05, 0.3, 0.5, 0.77, 1.0}) {
      const BinomialParams params{n, p};
      double previous = 1.0;
      for (std::int64_t k = 0; k <= n + 1; ++k) {
        const double tail = binomial_tail(k, params);
        REQUIRE(tail <= previous + 1e-15);
        REQUIRE(binomial_cdf(k - 1, params) + tail == doctest::Approx(1.0).epsilon(1e-12));
        previous = tail;
      }
    }
  }
}

TEST_CASE("pmf sums to one") {
  for (const double p : {0.1, 0.5, 0.93}) {
    double sum = 0.0;
    for (std::int64_t k = 0; k <= 300; ++k) sum += binomial_pmf(k, {300, p});
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(binomial_pmf(0, {0, 0.4}) == 1.0);
  CHECK(binomial_pmf(-1, {3, 0.4}) == 0.0);
}

TEST_CASE("sample_binomial fits the exact pmf") {
  struct Case {
    std::int64_t n;
    double p;
  };
  // Inversion, BTRD, the p > 1/2 flip and degenerate cases.
  for (const Case c : {Case{10, 0.3}, Case{64, 0.5}, Case{1000, 0.4}, Case{200, 0.9}, Case{5000, 0.01},
                       Case{3, 0.999}}) {
    CAPTURE(c.n);
    CAPTURE(c.p);
    Stream s(static_cast<std::uint64_t>(c.n) * 31 + 5);
    const BinomialParams params{c.n, c.p};
    std::vector<std::int64_t> counts(static_cast<std::size_t>(c.n + 1), 0);
    for (int i = 0; i < 100'000; ++i) {
      const auto x = sample_binomial(params, s);
      REQUIRE(x >= 0);
      REQUIRE(x <= c.n);
      ++counts[static_cast<std::size_t>(x)];
    }
    std::vector<double> probs(counts.size());
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = binomial_pmf(static_cast<std::int64_t>(k), params);
    CHECK(testing::chi_squared_test(counts, probs).p_value > 1e-3);
  }
  Stream s(1);
  CHECK(sample_binomial({0, 0.5}, s) == 0);
  CHECK(sample_binomial({9, 0.0}, s) == 0);
  CHECK(sample_binomial({9, 1.0}, s) == 9);
}

TEST_CASE("sample_beta fits the beta cdf") {
  struct Case {
    double a, b;
  };
  for (const Case c : {Case{1.0, 1.0}, Case{3.2, 0.8}, Case{0.4, 0.6}, Case{2.0, 7.0}}) {
    CAPTURE(c.a);
    CAPTURE(c.b);
    Stream s(77);
    const boost::math::beta_distribution<> dist(c.a, c.b);
    constexpr int bins = 20;
    std::vector<std::int64_t> counts(bins, 0);
    double sum = 0.0;
    for (int i = 0; i < 100'000; ++i) {
      const double x = sample_beta(c.a, c.b, s);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
      ++counts[std::min(bins - 1, static_cast<int>(x * bins))];
    }
    std::vector<double> probs(bins);
    for (int k = 0; k < bins; ++k) {
      probs[k] = boost::math::cdf(dist, (k + 1.0) / bins) - boost::math::cdf(dist, static_cast<double>(k) / bins);
    }
    CHECK(testing::chi_squared_test(counts, probs).p_value > 1e-3);
    // Mean a / (a + b); standard error is below 0.0016 for these shapes.
    CHECK(sum / 100'000 == doctest::Approx(c.a / (c.a + c.b)).epsilon(0.01));
  }
  Stream s(0);
  CHECK_THROWS_AS(sample_beta(0.0, 1.0, s), UsageError);
  CHECK_THROWS_AS(sample_gamma(-1.0, s), UsageError);
}

TEST_CASE("continuous samplers pass Kolmogorov-Smirnov") {
  Stream s(31337);
  std::vector<double> xs(100'000);
  for (auto& x : xs) x = sample_exponential(s);
  CHECK(testing::ks_p_value(xs, [](double x) { return 1.0 - std::exp(-x); }) > 1e-3);

  for (auto& x : xs) x = sample_normal(s);
  const boost::math::normal_distribution<> normal;
  CHECK(testing::ks_p_value(xs, [&](double x) { return boost::math::cdf(normal, x); }) > 1e-3);

  for (const double shape : {0.3, 1.0, 4.5}) {
    for (auto& x : xs) x = sample_gamma(shape, s);
    const boost::math::gamma_distribution<> gamma(shape);
    CHECK(testing::ks_p_value(xs, [&](double x) { return boost::math::cdf(gamma, x); }) > 1e-3);
  }
}

TEST_CASE("bernoulli frequency") {
  Stream s(4);
  std::int64_t ones = 0;
  for (int i = 0; i < 100'000; ++i) ones += sample_bernoulli(0.3, s);
  const auto r = testing::chi_squared_test({100'000 - ones, ones}, {0.7, 0.3});
  CHECK(r.p_value > 1e-3);
}
