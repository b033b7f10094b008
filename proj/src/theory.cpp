#include "phe/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "phe/distributions.hpp"
#include "phe/errors.hpp"
#include "phe/parallel.hpp"

namespace phe {

namespace {

constexpr double kPi = std::numbers::pi;

void require_c_domain(double a) {
  if (!(a > 2.0)) throw DomainError(fmt::format("the regret bounds need a > 2, got a={}", a));
}

bool at_most(double lhs, double rhs) { return lhs <= rhs * (1.0 + kComparisonTolerance); }
bool at_least(double lhs, double rhs) { return lhs >= rhs * (1.0 - kComparisonTolerance); }

}  // namespace

// -- Regret-bound formulas ----------------------------------------------------

double constant_c(double a) {
  require_c_domain(a);
  const double lead = std::exp(2.0) * std::sqrt(2.0 * a) / std::sqrt(kPi);
  const double blowup = std::exp(16.0 / (a - 2.0));
  const double tail = 1.0 + std::sqrt(kPi * a / (8.0 * (a - 2.0)));
  return lead * blowup * tail;
}

double log_constant_c(double a) {
  require_c_domain(a);
  return 2.0 + 0.5 * std::log(2.0 * a) - 0.5 * std::log(kPi) + 16.0 / (a - 2.0) +
         std::log1p(std::sqrt(kPi * a / (8.0 * (a - 2.0))));
}

double gap_dependent_bound(const BoundInputs& inputs) {
  require_c_domain(inputs.a);
  if (inputs.horizon < 2) throw DomainError(fmt::format("the bounds need n >= 2, got {}", inputs.horizon));
  if (inputs.num_arms > 0 && inputs.gaps.size() >= inputs.num_arms) {
    throw DomainError(fmt::format("{} gaps listed for {} arms; the best arm has no gap", inputs.gaps.size(),
                                  inputs.num_arms));
  }
  const double c = constant_c(inputs.a);
  const double log_n = std::log(static_cast<double>(inputs.horizon));
  double total = 0.0;
  for (double gap : inputs.gaps) {
    if (!(gap > 0.0 && gap <= 1.0)) throw DomainError(fmt::format("gaps must lie in (0, 1], got {}", gap));
    const double inv_sq = 1.0 / (gap * gap);
    const double a_term = 16.0 * inputs.a * c * inv_sq * log_n + 2.0;
    const double b_term = 8.0 * inputs.a * inv_sq * log_n + 3.0;
    total += gap * (a_term + b_term);
  }
  return total;
}

double gap_free_bound(double a, std::size_t num_arms, std::int64_t horizon) {
  require_c_domain(a);
  if (horizon < 2) throw DomainError(fmt::format("the bounds need n >= 2, got {}", horizon));
  const double c = constant_c(a);
  const auto k = static_cast<double>(num_arms);
  const auto n = static_cast<double>(horizon);
  return 4.0 * std::sqrt(2.0 * a * (2.0 * c + 1.0) * k * n * std::log(n)) + 5.0 * k;
}

double theorem4_bound(double a) {
  if (!(a > 1.0)) throw DomainError(fmt::format("the optimism bound needs a > 1, got a={}", a));
  const double lead = 2.0 * std::exp(2.0) * std::sqrt(a) / std::sqrt(kPi);
  return lead * std::exp(8.0 / (a - 1.0)) * (1.0 + std::sqrt(kPi * a / (8.0 * (a - 1.0))));
}

double log_theorem4_bound(double a) {
  if (!(a > 1.0)) throw DomainError(fmt::format("the optimism bound needs a > 1, got a={}", a));
  return std::log(2.0) + 2.0 + 0.5 * std::log(a) - 0.5 * std::log(kPi) + 8.0 / (a - 1.0) +
         std::log1p(std::sqrt(kPi * a / (8.0 * (a - 1.0))));
}

// -- Exact binomial models ----------------------------------------------------

ResolvedTailModel resolve(const TailModel& model) {
  if (model.pulls < 1 || model.pulls > kEnumerationBudget) {
    throw UsageError(fmt::format("exact enumeration needs 1 <= n <= {}, got {}", kEnumerationBudget, model.pulls));
  }
  if (!(model.mu >= 0.0 && model.mu <= 1.0)) throw UsageError(fmt::format("mu must be in [0, 1], got {}", model.mu));
  if (!(model.a > 0.0)) throw UsageError(fmt::format("a must be positive, got {}", model.a));
  ResolvedTailModel r;
  r.pulls = model.pulls;
  r.mu = model.mu;
  r.a = model.a;
  const double exact_trials = 2.0 * model.a * static_cast<double>(model.pulls);
  r.pseudo_trials = std::max<std::int64_t>(1, ceil_tolerant(exact_trials));
  r.rounded = std::abs(static_cast<double>(r.pseudo_trials) - exact_trials) > 1e-9 * exact_trials;
  r.real_mean = model.mu * static_cast<double>(model.pulls);
  r.pseudo_mean = 0.5 * static_cast<double>(r.pseudo_trials);
  return r;
}

std::int64_t pseudo_threshold(const ResolvedTailModel& model, double x) {
  return ceil_tolerant(model.real_mean + model.pseudo_mean - x);
}

double reciprocal_tail(const ResolvedTailModel& model, double x) {
  const double tail = binomial_tail(pseudo_threshold(model, x), {model.pseudo_trials, 0.5});
  return tail > 0.0 ? 1.0 / tail : INFINITY;
}

double expected_inverse_tail_exact(const TailModel& model) {
  const ResolvedTailModel r = resolve(model);
  const BinomialParams real{r.pulls, r.mu};
  double w = 0.0;
  for (std::int64_t x = 0; x <= r.pulls; ++x) {
    const double weight = binomial_pmf(x, real);
    if (weight == 0.0) continue;
    const double inverse = reciprocal_tail(r, static_cast<double>(x));
    if (std::isinf(inverse)) return INFINITY;
    w += weight * inverse;
  }
  return w;
}

QProbability q_exact(double reward_sum, std::int64_t pulls, double a, double tau) {
  if (pulls < 1) throw UsageError("Q is only defined for pulled arms");
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError(fmt::format("tau must be in [0, 1], got {}", tau));
  const std::int64_t pseudo = ceil_tolerant(a * static_cast<double>(pulls));
  const double needed = static_cast<double>(pulls + pseudo) * tau - reward_sum;
  const double q = binomial_tail(ceil_tolerant(needed), {pseudo, 0.5});
  return {q, q > 0.0 ? 1.0 / q - 1.0 : INFINITY};
}

TailProbeResult tail_optimism_probe(const TailProbe& probe) {
  if (probe.pulls < 1 || probe.pulls > kEnumerationBudget) {
    throw UsageError(fmt::format("probe needs 1 <= s <= {}, got {}", kEnumerationBudget, probe.pulls));
  }
  if (!(probe.epsilon > 0.0)) throw UsageError("probe deviation must be positive");
  const auto s = static_cast<double>(probe.pulls);
  const std::int64_t pseudo = ceil_tolerant(probe.a * s);
  TailProbeResult result;
  result.p_pseudo = binomial_tail(ceil_tolerant(0.5 * static_cast<double>(pseudo) + probe.epsilon * s),
                                  {pseudo, 0.5});
  const std::int64_t worst_real = floor_tolerant(probe.mu * s - probe.epsilon * s);
  result.p_real = worst_real < 0 ? 0.0 : binomial_cdf(worst_real, {probe.pulls, probe.mu});
  return result;
}

// -- Checks -------------------------------------------------------------------

DecreasingFunction DecreasingFunction::tabulated(std::string name, std::vector<double> values) {
  if (values.empty()) throw UsageError("a tabulated function needs at least one value");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0) throw UsageError(fmt::format("tabulated function is negative at {}", i));
    if (i > 0 && values[i] > values[i - 1]) {
      throw UsageError(fmt::format("tabulated function increases between {} and {}", i - 1, i));
    }
  }
  return DecreasingFunction(std::move(name), [table = std::move(values)](double x) {
    const double last = static_cast<double>(table.size() - 1);
    x = std::clamp(x, 0.0, last);
    const auto lo = static_cast<std::size_t>(std::floor(x));
    if (lo + 1 >= table.size()) return table.back();
    const double frac = x - static_cast<double>(lo);
    return table[lo] + frac * (table[lo + 1] - table[lo]);
  });
}

DecreasingFunction constant_family() {
  return DecreasingFunction("constant", [](double) { return 1.0; });
}

DecreasingFunction linear_family(std::int64_t n) {
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  for (std::int64_t x = 0; x <= n; ++x) {
    values[static_cast<std::size_t>(x)] = 1.0 - static_cast<double>(x) / static_cast<double>(n);
  }
  return DecreasingFunction::tabulated("linear", std::move(values));
}

DecreasingFunction reciprocal_tail_family(std::int64_t n, double mu, double a) {
  const ResolvedTailModel model = resolve({n, mu, a});
  return DecreasingFunction(fmt::format("reciprocal_tail(a={})", a),
                            [model](double x) { return reciprocal_tail(model, x); });
}

TheoryCheckReport lemma2_check(std::int64_t n, double mu, const DecreasingFunction& f) {
  if (n < 1) throw UsageError("partition check needs n >= 1");
  if (!(mu >= 0.0 && mu <= 1.0)) throw UsageError(fmt::format("mu must be in [0, 1], got {}", mu));
  const auto nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  const double mean = mu * nd;

  // Smallest i0 >= 0 with (i0 + 1) sqrt(n) >= mean.
  const std::int64_t i0 = std::max<std::int64_t>(0, ceil_tolerant(mean / root_n) - 1);

  std::vector<std::pair<double, double>> samples;  // (x, f(x)) for the monotonicity check
  auto eval = [&](double x) {
    const double value = f(x);
    samples.emplace_back(x, value);
    return value;
  };

  double expectation = 0.0;
  const BinomialParams params{n, mu};
  for (std::int64_t x = 0; x <= n; ++x) {
    const double value = eval(static_cast<double>(x));
    const double weight = binomial_pmf(x, params);
    if (weight > 0.0) expectation += weight * value;
  }
  double bound = 0.0;
  for (std::int64_t i = 0; i < i0; ++i) {
    const auto id = static_cast<double>(i);
    bound += std::exp(-2.0 * id * id) * eval(mean - (id + 1.0) * root_n);
  }
  const auto i0d = static_cast<double>(i0);
  bound += std::exp(-2.0 * i0d * i0d) * eval(0.0);

  std::sort(samples.begin(), samples.end());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (samples[k].second < 0.0) {
      throw UsageError(fmt::format("{} is negative at x={}", f.name(), samples[k].first));
    }
    if (k > 0 && samples[k].second > samples[k - 1].second) {
      throw UsageError(fmt::format("{} increases between x={} and x={}", f.name(), samples[k - 1].first,
                                   samples[k].first));
    }
  }

  TheoryCheckReport report;
  report.check = "lemma2";
  report.parameters = fmt::format("f={};n={};mu={};i0={}", f.name(), n, mu, i0);
  report.lhs = expectation;
  report.rhs = bound;
  report.margin = bound - expectation;
  report.pass = at_most(expectation, bound);
  return report;
}

std::vector<double> lemma3_delta_grid(std::int64_t n, double a, std::size_t count) {
  const double top = a * static_cast<double>(n);
  std::vector<double> deltas(count);
  for (std::size_t k = 0; k < count; ++k) {
    deltas[k] = count == 1 ? 0.0 : top * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return deltas;
}

std::vector<TheoryCheckReport> lemma3_check(std::int64_t n, double a, std::span<const double> deltas) {
  if (n < 1) throw UsageError("pseudo-reward tail check needs n >= 1");
  const auto nd = static_cast<double>(n);
  const double an = a * nd;
  const double exact_trials = 2.0 * an;
  const std::int64_t trials = ceil_tolerant(exact_trials);
  if (std::abs(static_cast<double>(trials) - exact_trials) > 1e-9 * exact_trials) {
    throw UsageError(fmt::format("pseudo-reward tail check needs 2an integral, got {}", exact_trials));
  }
  const double scale = std::sqrt(kPi) / (std::exp(2.0) * std::sqrt(a));
  std::vector<TheoryCheckReport> reports;
  reports.reserve(deltas.size());
  for (double delta : deltas) {
    if (delta < -1e-12 || delta > an * (1.0 + 1e-12)) {
      throw UsageError(fmt::format("pseudo-reward tail check needs delta in [0, an], got {}", delta));
    }
    const double lhs = binomial_tail(ceil_tolerant(an + delta), {trials, 0.5});
    const double spread = delta + std::sqrt(nd);
    const double rhs = scale * std::exp(-2.0 * spread * spread / an);
    TheoryCheckReport report;
    report.check = "lemma3";
    report.parameters = fmt::format("n={};a={};delta={}", n, a, delta);
    report.lhs = lhs;
    report.rhs = rhs;
    report.margin = lhs - rhs;
    report.pass = at_least(lhs, rhs);
    reports.push_back(std::move(report));
  }
  return reports;
}

TheoryCheckReport theorem4_check(const TailModel& model) {
  const ResolvedTailModel r = resolve(model);
  TheoryCheckReport report;
  report.check = "theorem4";
  report.lhs = expected_inverse_tail_exact(model);
  const double log_rhs = log_theorem4_bound(model.a);
  report.rhs = theorem4_bound(model.a);
  report.parameters = fmt::format("a={};n={};mu={};pseudo_trials={}{}", model.a, model.pulls, model.mu,
                                  r.pseudo_trials, r.rounded ? "(rounded)" : "");
  if (std::isinf(report.rhs)) {
    // Past double range; compare logarithms and flag the magnitude.
    report.parameters += fmt::format(";log_rhs={:.6f}", log_rhs);
    report.margin = INFINITY;
    report.pass = std::log(report.lhs) <= log_rhs;
  } else {
    report.margin = report.rhs - report.lhs;
    report.pass = at_most(report.lhs, report.rhs);
  }
  return report;
}

std::vector<TheoryCheckReport> hoeffding_check(std::int64_t s, double mu, double epsilon) {
  const auto sd = static_cast<double>(s);
  const BinomialParams params{s, mu};
  const double bound = std::exp(-2.0 * epsilon * epsilon * sd);
  const double upper = binomial_tail(ceil_tolerant(sd * mu + epsilon * sd), params);
  const std::int64_t lower_k = floor_tolerant(sd * mu - epsilon * sd);
  const double lower = lower_k < 0 ? 0.0 : binomial_cdf(lower_k, params);
  std::vector<TheoryCheckReport> reports;
  for (auto [side, exact] : {std::pair{"upper", upper}, std::pair{"lower", lower}}) {
    TheoryCheckReport report;
    report.check = "hoeffding";
    report.parameters = fmt::format("side={};s={};mu={};eps={}", side, s, mu, epsilon);
    report.lhs = exact;
    report.rhs = bound;
    report.margin = bound - exact;
    report.pass = at_most(exact, bound);
    reports.push_back(std::move(report));
  }
  return reports;
}

TheoryCheckReport constant_c_check(double a) {
  TheoryCheckReport report;
  report.check = "constant_c";
  report.parameters = fmt::format("a={}", a);
  try {
    report.lhs = constant_c(a);
    report.rhs = std::exp(log_constant_c(a));
    const double rel = std::abs(report.lhs - report.rhs) / report.rhs;
    report.margin = 1e-10 - rel;
    report.pass = rel <= 1e-10;
  } catch (const DomainError&) {
    report.parameters += ";domain_error";
    report.lhs = NAN;
    report.rhs = NAN;
    report.margin = NAN;
    report.pass = false;
  }
  return report;
}

// -- Grids --------------------------------------------------------------------

std::vector<TheoryCheckReport> theorem4_grid(const VerifyGrid& grid, std::size_t workers) {
  std::vector<TailModel> models;
  for (double a : grid.theorem4_a) {
    for (std::int64_t n = 1; n <= grid.theorem4_n_max; ++n) {
      for (double mu : grid.mu_values) models.push_back({n, mu, a});
    }
  }
  std::vector<TheoryCheckReport> reports(models.size());
  parallel_for(models.size(), workers, [&](std::size_t i) { reports[i] = theorem4_check(models[i]); });
  return reports;
}

std::vector<TheoryCheckReport> lemma3_grid(const VerifyGrid& grid, std::size_t workers) {
  std::vector<std::pair<std::int64_t, double>> points;
  for (double a : grid.lemma3_a) {
    for (std::int64_t n = 1; n <= grid.lemma3_n_max; ++n) points.emplace_back(n, a);
  }
  std::vector<std::vector<TheoryCheckReport>> chunks(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const auto [n, a] = points[i];
    chunks[i] = lemma3_check(n, a, lemma3_delta_grid(n, a, grid.lemma3_deltas));
  });
  std::vector<TheoryCheckReport> reports;
  for (auto& chunk : chunks) reports.insert(reports.end(), chunk.begin(), chunk.end());
  return reports;
}

std::vector<TheoryCheckReport> lemma2_grid(const VerifyGrid& grid, std::size_t workers) {
  struct Point {
    std::int64_t n;
    double mu;
    int family;  // 0 constant, 1 linear, 2 + k reciprocal tail with lemma2_a[k]
  };
  std::vector<Point> points;
  const int families = 2 + static_cast<int>(grid.lemma2_a.size());
  for (int family = 0; family < families; ++family) {
    for (std::int64_t n = 1; n <= grid.lemma2_n_max; ++n) {
      for (double mu : grid.mu_values) points.push_back({n, mu, family});
    }
  }
  std::vector<TheoryCheckReport> reports(points.size());
  parallel_for(points.size(), workers, [&](std::size_t i) {
    const Point& p = points[i];
    if (p.family == 0) {
      reports[i] = lemma2_check(p.n, p.mu, constant_family());
    } else if (p.family == 1) {
      reports[i] = lemma2_check(p.n, p.mu, linear_family(p.n));
    } else {
      const double a = grid.lemma2_a[static_cast<std::size_t>(p.family - 2)];
      reports[i] = lemma2_check(p.n, p.mu, reciprocal_tail_family(p.n, p.mu, a));
    }
  });
  return reports;
}

std::vector<TheoryCheckReport> hoeffding_grid(const VerifyGrid& grid) {
  std::vector<TheoryCheckReport> reports;
  for (std::int64_t s = 1; s <= grid.hoeffding_s_max; ++s) {
    for (double mu : grid.hoeffding_mu) {
      for (double eps : grid.hoeffding_eps) {
        auto rows = hoeffding_check(s, mu, eps);
        reports.insert(reports.end(), rows.begin(), rows.end());
      }
    }
  }
  return reports;
}

std::vector<TheoryCheckReport> constant_c_grid(const VerifyGrid& grid) {
  std::vector<TheoryCheckReport> reports;
  for (double a : grid.constant_c_a) reports.push_back(constant_c_check(a));
  return reports;
}

std::vector<TheoryCheckReport> tail_optimism_grid(const VerifyGrid& grid) {
  std::vector<TheoryCheckReport> reports;
  for (double a : grid.optimism_a) {
    std::int64_t points = 0;
    std::int64_t wins = 0;
    for (std::int64_t s = grid.optimism_s_min; s <= grid.optimism_s_max; ++s) {
      const auto sd = static_cast<double>(s);
      for (double mu : grid.optimism_mu) {
        // Achievable deviations: V = v for integers 0 <= v < s mu.
        const double mean = mu * sd;
        for (std::int64_t v = 0; static_cast<double>(v) < mean - 1e-9; ++v) {
          const double eps = (mean - static_cast<double>(v)) / sd;
          const TailProbeResult r = tail_optimism_probe({s, a, mu, eps});
          ++points;
          if (r.p_pseudo > r.p_real) ++wins;
        }
      }
    }
    TheoryCheckReport report;
    report.check = "tail_optimism_coverage";
    report.parameters = fmt::format("a={};s={}..{};points={};wins={}", a, grid.optimism_s_min,
                                    grid.optimism_s_max, points, wins);
    report.lhs = points > 0 ? static_cast<double>(wins) / static_cast<double>(points) : 0.0;
    report.rhs = 1.0;
    report.margin = report.lhs - report.rhs;
    report.pass = wins == points;
    report.mandatory = false;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::vector<TheoryCheckReport> run_verification(const VerifyGrid& grid, std::size_t workers) {
  std::vector<TheoryCheckReport> all;
  auto append = [&](std::vector<TheoryCheckReport> rows) {
    all.insert(all.end(), std::make_move_iterator(rows.begin()), std::make_move_iterator(rows.end()));
  };
  append(constant_c_grid(grid));
  append(theorem4_grid(grid, workers));
  append(lemma3_grid(grid, workers));
  append(lemma2_grid(grid, workers));
  append(hoeffding_grid(grid));
  append(tail_optimism_grid(grid));
  return all;
}

}  // namespace phe
