#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phe {

// -- Regret-bound formulas ----------------------------------------------------

struct BoundInputs {
  double a = 2.1;
  /// Gaps of the suboptimal arms, each in (0, 1].
  std::vector<double> gaps;
  std::int64_t horizon = 2;
  /// Total arm count; 0 skips the gaps.size() < num_arms check.
  std::size_t num_arms = 0;
};

/// Constant of the gap-dependent bound. Requires a > 2.
double constant_c(double a);
/// log(constant_c(a)), evaluated term by term in the log domain.
double log_constant_c(double a);

/// sum_i gap_i * ((16 a c / gap_i^2) log n + 2 + (8 a / gap_i^2) log n + 3).
double gap_dependent_bound(const BoundInputs& inputs);
/// 4 sqrt(2 a (2c + 1) K n log n) + 5K.
double gap_free_bound(double a, std::size_t num_arms, std::int64_t horizon);

/// Bound on E[1 / P(X + Y >= E[X] + E[Y] | X)] for Y ~ Binomial(2an, 1/2). Requires a > 1.
/// Overflows to +inf once 8 / (a - 1) exceeds ~709; use the log form there.
double theorem4_bound(double a);
double log_theorem4_bound(double a);

/// The optimism bound is stated for 2an pseudo-rewards, while PHE adds a*s of
/// them; a PHE scale `a` therefore corresponds to a/2 in theorem4_bound, and
/// constant_c(a) == theorem4_bound(theorem4_scale_for_phe(a)).
constexpr double theorem4_scale_for_phe(double phe_a) noexcept { return phe_a / 2.0; }

// -- Exact binomial models ----------------------------------------------------

/// X ~ Binomial(pulls, mu) real rewards, Y ~ Binomial(2 a pulls, 1/2) pseudo-rewards.
struct TailModel {
  std::int64_t pulls = 1;
  double mu = 0.5;
  double a = 2.0;
};

struct ResolvedTailModel {
  std::int64_t pulls = 0;
  double mu = 0.0;
  double a = 0.0;
  std::int64_t pseudo_trials = 0;  ///< 2an, rounded up when fractional
  bool rounded = false;
  double real_mean = 0.0;    ///< mu * n
  double pseudo_mean = 0.0;  ///< pseudo_trials / 2
};

inline constexpr std::int64_t kEnumerationBudget = 200;

ResolvedTailModel resolve(const TailModel& model);

/// Smallest y with x + y >= E[X] + E[Y].
std::int64_t pseudo_threshold(const ResolvedTailModel& model, double x);

/// 1 / P(Y >= pseudo_threshold(x)), the decreasing function averaged by W.
double reciprocal_tail(const ResolvedTailModel& model, double x);

/// W = E[1 / P(X + Y >= E[X] + E[Y] | X)] by enumerating X. Refuses pulls
/// above kEnumerationBudget; returns +inf if some conditional tail is zero.
double expected_inverse_tail_exact(const TailModel& model);

struct QProbability {
  double q = 0.0;
  /// 1 / q - 1; +inf when q == 0.
  double f = 0.0;
};

/// P(V + U >= (s + ceil(a s)) tau) with U ~ Binomial(ceil(a s), 1/2).
QProbability q_exact(double reward_sum, std::int64_t pulls, double a, double tau);

struct TailProbe {
  std::int64_t pulls = 10;
  double a = 2.0;
  double mu = 0.5;
  double epsilon = 0.1;
};

struct TailProbeResult {
  double p_pseudo = 0.0;  ///< P(U/s - E[U]/s >= eps), U ~ Binomial(ceil(a s), 1/2)
  double p_real = 0.0;    ///< P(E[V]/s - V/s >= eps),  V ~ Binomial(s, mu)
};

TailProbeResult tail_optimism_probe(const TailProbe& probe);

// -- Checks -------------------------------------------------------------------

struct TheoryCheckReport {
  std::string check;
  std::string parameters;
  double lhs = 0.0;
  double rhs = 0.0;
  /// Slack in the direction the inequality claims; negative means violated.
  double margin = 0.0;
  bool pass = false;
  /// Informational rows are reported but never fail a verification run.
  bool mandatory = true;
};

/// Relative tolerance applied to every exact-vs-bound comparison.
inline constexpr double kComparisonTolerance = 1e-9;

/// Nonnegative nonincreasing function on [0, n].
class DecreasingFunction {
 public:
  DecreasingFunction(std::string name, std::function<double(double)> f)
      : name_(std::move(name)), f_(std::move(f)) {}

  /// Piecewise-linear interpolation of values at 0, 1, ..., size - 1.
  static DecreasingFunction tabulated(std::string name, std::vector<double> values);

  double operator()(double x) const { return f_(x); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  std::function<double(double)> f_;
};

/// Exact E[f(X)], X ~ Binomial(n, mu), against the Hoeffding partition bound.
/// Throws UsageError if f is negative or increasing on the evaluated points.
TheoryCheckReport lemma2_check(std::int64_t n, double mu, const DecreasingFunction& f);

/// The three families the optimism argument relies on: constant, linear and
/// the reciprocal tail of a TailModel with the given a.
DecreasingFunction constant_family();
DecreasingFunction linear_family(std::int64_t n);
DecreasingFunction reciprocal_tail_family(std::int64_t n, double mu, double a);

/// `count` evenly spaced deltas covering [0, a n].
std::vector<double> lemma3_delta_grid(std::int64_t n, double a, std::size_t count = 21);

/// Binomial(2an, 1/2) tail from ceil(an + delta) against its closed-form lower bound.
std::vector<TheoryCheckReport> lemma3_check(std::int64_t n, double a, std::span<const double> deltas);

TheoryCheckReport theorem4_check(const TailModel& model);

/// Both one-sided Hoeffding bounds for Binomial(s, mu) at deviation eps * s.
std::vector<TheoryCheckReport> hoeffding_check(std::int64_t s, double mu, double epsilon);

/// Direct vs log-domain evaluation of c(a); a domain error becomes a failing row.
TheoryCheckReport constant_c_check(double a);

// -- Grids --------------------------------------------------------------------

struct VerifyGrid {
  std::vector<double> theorem4_a = {1.5, 2.0, 3.0, 6.0};
  std::int64_t theorem4_n_max = 50;
  std::vector<double> mu_values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  std::vector<double> lemma3_a = {1.0, 2.0, 4.0};
  std::int64_t lemma3_n_max = 50;
  std::size_t lemma3_deltas = 21;

  std::int64_t lemma2_n_max = 50;
  std::vector<double> lemma2_a = {1.5, 2.0, 3.0, 6.0};

  std::int64_t hoeffding_s_max = 100;
  std::vector<double> hoeffding_mu = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> hoeffding_eps = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5};

  std::vector<double> constant_c_a = {2.1, 3.0, 4.0, 6.0, 10.0};

  std::int64_t optimism_s_min = 5;
  std::int64_t optimism_s_max = 100;
  std::vector<double> optimism_mu = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> optimism_a = {1.1, 2.1};
};

std::vector<TheoryCheckReport> theorem4_grid(const VerifyGrid& grid, std::size_t workers = 1);
std::vector<TheoryCheckReport> lemma3_grid(const VerifyGrid& grid, std::size_t workers = 1);
std::vector<TheoryCheckReport> lemma2_grid(const VerifyGrid& grid, std::size_t workers = 1);
std::vector<TheoryCheckReport> hoeffding_grid(const VerifyGrid& grid);
std::vector<TheoryCheckReport> constant_c_grid(const VerifyGrid& grid);
/// One informational row per a: the fraction of achievable lattice deviations
/// where p_pseudo > p_real.
std::vector<TheoryCheckReport> tail_optimism_grid(const VerifyGrid& grid);

/// Every grid above, in a fixed order.
std::vector<TheoryCheckReport> run_verification(const VerifyGrid& grid, std::size_t workers = 1);

}  // namespace phe
