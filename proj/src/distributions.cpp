#include "phe/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "phe/errors.hpp"

namespace phe {

void BinomialParams::validate() const {
  if (trials < 0) {
    throw UsageError(fmt::format("binomial trials must be >= 0, got {}", trials));
  }
  if (!(success_prob >= 0.0 && success_prob <= 1.0)) {
    throw UsageError(
        fmt::format("binomial success probability must be in [0, 1], got {}", success_prob));
  }
}

namespace {

constexpr double kIntegerSlack = 1e-9;

// log(n!) - log(sqrt(2 pi n) (n / e)^n) for n = 0..15; entry 0 is unused.
constexpr std::array<double, 16> kStirlingError = {
    0.0,
    0.0810614667953272582196702,
    0.0413406959554092940938221,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.010411265261972096497478567,
    0.009255462182712732917728637,
    0.008330563433362871256469318,
    0.007573675487951840794972024,
    0.006942840107209529865664152,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.005554733551962801371038690,
};

double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) return kStirlingError[static_cast<std::size_t>(n)];
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x / np) + np - x, evaluated without cancellation.
double deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// Loader's saddle-point form of the binomial log-pmf.
double log_pmf_raw(double x, double n, double p, double q) {
  if (p == 0.0) return x == 0.0 ? 0.0 : -INFINITY;
  if (q == 0.0) return x == n ? 0.0 : -INFINITY;
  if (x == 0.0) {
    if (n == 0.0) return 0.0;
    return p < 0.1 ? -deviance(n, n * q) - n * p : n * std::log(q);
  }
  if (x == n) {
    return q < 0.1 ? -deviance(n, n * p) - n * q : n * std::log(p);
  }
  const double lc = stirling_error(n) - stirling_error(x) - stirling_error(n - x) -
                    deviance(x, n * p) - deviance(n - x, n * q);
  const double lf = std::log(2 * std::numbers::pi) + std::log(x) + std::log1p(-x / n);
  return lc - 0.5 * lf;
}

struct TailPair {
  double lower;  // P(X <= k - 1)
  double upper;  // P(X >= k)
};

constexpr double kNegligible = 1e-20;

TailPair tails(std::int64_t k, const BinomialParams& params) {
  params.validate();
  const std::int64_t n = params.trials;
  const double p = params.success_prob;
  const double q = 1.0 - p;
  if (k <= 0) return {0.0, 1.0};
  if (k > n) return {1.0, 0.0};
  if (p == 0.0) return {1.0, 0.0};
  if (q == 0.0) return {0.0, 1.0};

  const auto nd = static_cast<double>(n);
  if (static_cast<double>(k) > nd * p) {
    // Terms decrease from k upward.
    double term = std::exp(log_pmf_raw(static_cast<double>(k), nd, p, q));
    double sum = term;
    const double ratio = p / q;
    for (std::int64_t j = k; j < n && term > 0.0; ++j) {
      term *= static_cast<double>(n - j) / static_cast<double>(j + 1) * ratio;
      sum += term;
      if (term < sum * kNegligible) break;
    }
    sum = std::min(sum, 1.0);
    return {1.0 - sum, sum};
  }
  // Terms decrease from k - 1 downward.
  double term = std::exp(log_pmf_raw(static_cast<double>(k - 1), nd, p, q));
  double sum = term;
  const double ratio = q / p;
  for (std::int64_t j = k - 1; j > 0 && term > 0.0; --j) {
    term *= static_cast<double>(j) / static_cast<double>(n - j + 1) * ratio;
    sum += term;
    if (term < sum * kNegligible) break;
  }
  sum = std::min(sum, 1.0);
  return {sum, 1.0 - sum};
}

std::int64_t binomial_inversion(std::int64_t n, double p, Stream& stream) {
  const double q = 1.0 - p;
  const double odds = p / q;
  const double a = static_cast<double>(n + 1) * odds;
  const double r0 = std::pow(q, static_cast<double>(n));
  for (;;) {
    double u = stream.uniform();
    double r = r0;
    std::int64_t x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - odds;
    }
    if (x <= n) return x;
  }
}

// Stirling correction at k + 1, as used by BTRD.
double btrd_fc(std::int64_t k) { return stirling_error(static_cast<double>(k + 1)); }

// Hoermann (1993), "The generation of binomial random variates", algorithm BTRD.
// Requires p <= 1/2 and (n + 1) p >= 11.
std::int64_t binomial_btrd(std::int64_t n, double p, Stream& stream) {
  const double nd = static_cast<double>(n);
  const auto m = static_cast<std::int64_t>((nd + 1) * p);
  const double r = p / (1 - p);
  const double nr = (nd + 1) * r;
  const double npq = nd * p * (1 - p);
  const double sqrt_npq = std::sqrt(npq);
  const double b = 1.15 + 2.53 * sqrt_npq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double alpha = (2.83 + 5.1 / b) * sqrt_npq;
  const double v_r = 0.92 - 4.2 / b;
  const double u_rv_r = 0.86 * v_r;

  for (;;) {
    double v = stream.uniform();
    double u;
    if (v <= u_rv_r) {
      u = v / v_r - 0.43;
      return static_cast<std::int64_t>(std::floor((2 * a / (0.5 - std::abs(u)) + b) * u + c));
    }
    if (v >= v_r) {
      u = stream.uniform() - 0.5;
    } else {
      u = v / v_r - 0.93;
      u = (u < 0 ? -0.5 : 0.5) - u;
      v = stream.uniform() * v_r;
    }
    const double us = 0.5 - std::abs(u);
    const double kd = std::floor((2 * a / us + b) * u + c);
    if (kd < 0 || kd > nd) continue;
    const auto k = static_cast<std::int64_t>(kd);
    v = v * alpha / (a / (us * us) + b);
    const auto km = static_cast<double>(k > m ? k - m : m - k);
    if (km <= 15) {
      double f = 1;
      if (m < k) {
        for (std::int64_t i = m + 1; i <= k; ++i) f *= nr / static_cast<double>(i) - r;
      } else if (m > k) {
        for (std::int64_t i = k + 1; i <= m; ++i) v *= nr / static_cast<double>(i) - r;
      }
      if (v <= f) return k;
      continue;
    }
    v = std::log(v);
    const double rho = (km / npq) * (((km / 3.0 + 0.625) * km + 1.0 / 6) / npq + 0.5);
    const double t = -km * km / (2 * npq);
    if (v < t - rho) return k;
    if (v > t + rho) continue;
    const double nm = static_cast<double>(n - m + 1);
    const double h = (static_cast<double>(m) + 0.5) * std::log((static_cast<double>(m) + 1) / (r * nm)) +
                     btrd_fc(m) + btrd_fc(n - m);
    const double nk = static_cast<double>(n - k + 1);
    if (v <= h + (nd + 1) * std::log(nm / nk) +
                 (kd + 0.5) * std::log(nk * r / (kd + 1)) - btrd_fc(k) - btrd_fc(n - k)) {
      return k;
    }
  }
}

}  // namespace

std::int64_t ceil_tolerant(double x) noexcept {
  const double slack = kIntegerSlack * std::max(1.0, std::abs(x));
  return static_cast<std::int64_t>(std::ceil(x - slack));
}

std::int64_t floor_tolerant(double x) noexcept {
  const double slack = kIntegerSlack * std::max(1.0, std::abs(x));
  return static_cast<std::int64_t>(std::floor(x + slack));
}

std::int64_t sample_binomial(const BinomialParams& params, Stream& stream) {
  const std::int64_t n = params.trials;
  const double p = params.success_prob;
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  const bool small = n <= 64 || static_cast<double>(n + 1) * pp < 11.0;
  const std::int64_t x = small ? binomial_inversion(n, pp, stream) : binomial_btrd(n, pp, stream);
  return flip ? n - x : x;
}

bool sample_bernoulli(double p, Stream& stream) { return stream.uniform() < p; }

double sample_exponential(Stream& stream) { return -std::log(stream.uniform_open()); }

double sample_normal(Stream& stream) {
  const double radius = std::sqrt(-2.0 * std::log(stream.uniform_open()));
  return radius * std::cos(2.0 * std::numbers::pi * stream.uniform());
}

double sample_gamma(double shape, Stream& stream) {
  if (!(shape > 0.0) || std::isinf(shape)) {
    throw UsageError(fmt::format("gamma shape must be positive and finite, got {}", shape));
  }
  if (shape < 1.0) {
    const double boost = std::pow(stream.uniform_open(), 1.0 / shape);
    return sample_gamma(shape + 1.0, stream) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(stream);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = stream.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double sample_beta(double alpha, double beta, Stream& stream) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw UsageError(fmt::format("beta parameters must be positive, got ({}, {})", alpha, beta));
  }
  const double x = sample_gamma(alpha, stream);
  const double y = sample_gamma(beta, stream);
  const double total = x + y;
  // Both gammas can underflow for tiny shapes.
  if (total == 0.0) return stream.uniform() < alpha / (alpha + beta) ? 1.0 : 0.0;
  return x / total;
}

double log_binomial_pmf(std::int64_t k, const BinomialParams& params) {
  params.validate();
  if (k < 0 || k > params.trials) return -INFINITY;
  return log_pmf_raw(static_cast<double>(k), static_cast<double>(params.trials),
                     params.success_prob, 1.0 - params.success_prob);
}

double binomial_pmf(std::int64_t k, const BinomialParams& params) {
  return std::exp(log_binomial_pmf(k, params));
}

double binomial_tail(std::int64_t k, const BinomialParams& params) {
  return tails(k, params).upper;
}

double binomial_cdf(std::int64_t k, const BinomialParams& params) {
  if (k >= params.trials) {
    params.validate();
    return 1.0;
  }
  return tails(k + 1, params).lower;
}

}  // namespace phe
