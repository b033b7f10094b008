#pragma once

#include <cstdint>

#include "phe/rng.hpp"

namespace phe {

struct BinomialParams {
  std::int64_t trials = 0;
  double success_prob = 0.5;

  /// Throws UsageError unless trials >= 0 and success_prob is in [0, 1].
  void validate() const;
};

/// Smallest integer >= x, treating values within a few ulps above an integer
/// as that integer (so 1.1 * 10 maps to 11, not 12).
std::int64_t ceil_tolerant(double x) noexcept;
/// Largest integer <= x, with the same tolerance as ceil_tolerant.
std::int64_t floor_tolerant(double x) noexcept;

/// Draws from Binomial(trials, success_prob). Inversion for small problems,
/// Hoermann's BTRD rejection sampler otherwise; expected O(1) for large trials.
std::int64_t sample_binomial(const BinomialParams& params, Stream& stream);

bool sample_bernoulli(double p, Stream& stream);
double sample_exponential(Stream& stream);
double sample_normal(Stream& stream);
/// Marsaglia-Tsang; shape > 0, unit scale.
double sample_gamma(double shape, Stream& stream);
double sample_beta(double alpha, double beta, Stream& stream);

double log_binomial_pmf(std::int64_t k, const BinomialParams& params);
double binomial_pmf(std::int64_t k, const BinomialParams& params);

/// Exact P(X >= k) for X ~ Binomial. Sums whichever tail is smaller, starting
/// at its largest term, so small tails keep full relative precision.
double binomial_tail(std::int64_t k, const BinomialParams& params);
/// Exact P(X <= k); binomial_cdf(k - 1) + binomial_tail(k) == 1.
double binomial_cdf(std::int64_t k, const BinomialParams& params);

}  // namespace phe
