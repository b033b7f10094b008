#pragma once

// Goodness-of-fit helpers shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace phe::testing {

struct ChiSquared {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

/// Pearson test of counts against cell probabilities. Adjacent cells are
/// pooled left to right until each expected count reaches min_expected.
inline ChiSquared chi_squared_test(const std::vector<std::int64_t>& observed, const std::vector<double>& probs,
                                   double min_expected = 5.0) {
  double total = 0.0;
  for (auto c : observed) total += static_cast<double>(c);
  std::vector<double> obs_pooled, exp_pooled;
  double o = 0.0, e = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    o += static_cast<double>(observed[i]);
    e += probs[i] * total;
    if (e >= min_expected) {
      obs_pooled.push_back(o);
      exp_pooled.push_back(e);
      o = e = 0.0;
    }
  }
  if (e > 0.0 || o > 0.0) {
    if (exp_pooled.empty()) {
      obs_pooled.push_back(o);
      exp_pooled.push_back(e);
    } else {
      obs_pooled.back() += o;
      exp_pooled.back() += e;
    }
  }
  ChiSquared r;
  for (std::size_t i = 0; i < obs_pooled.size(); ++i) {
    const double d = obs_pooled[i] - exp_pooled[i];
    r.statistic += d * d / exp_pooled[i];
  }
  r.dof = obs_pooled.size() > 1 ? obs_pooled.size() - 1 : 1;
  const boost::math::chi_squared dist(static_cast<double>(r.dof));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

/// One-sample Kolmogorov-Smirnov test; p-value from the asymptotic
/// distribution with Stephens' small-sample correction.
inline double ks_p_value(std::vector<double> samples, const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const auto n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  const double lambda = (root + 0.12 + 0.11 / root) * d;
  if (lambda < 1e-3) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-16) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace phe::testing
