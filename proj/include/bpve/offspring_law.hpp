#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bpve/random.hpp"

namespace bpve {

enum class LawKind { finite, poisson, binary };

std::string to_string(LawKind kind);

/// Reproduction law of one generation, with its generating function
/// f(s) = sum_k p_k s^k and the quantities derived from it.
///
/// Values are immutable after construction. All evaluations near s = 1 have
/// a companion taking the gap x = 1 - s directly, because the gaps that the
/// survival recursion produces (down to 1e-40 and below) are not
/// representable as 1 - x in double precision.
class OffspringLaw {
 public:
  /// Weights p_0..p_K; must be nonnegative and sum to 1 within 1e-12.
  static OffspringLaw finite(std::vector<double> weights);
  static OffspringLaw poisson(double lambda);
  /// p_2 = mean/2, p_0 = 1 - mean/2, mean in (0, 2].
  static OffspringLaw binary(double mean);

  LawKind kind() const noexcept { return kind_; }
  double mean() const noexcept { return mean_; }
  double log_mean() const noexcept { return log_mean_; }
  /// f''(1) = E[Y(Y-1)].
  double factorial_moment2() const noexcept { return factorial2_; }
  /// f''(1) / f'(1)^2.
  double nu() const noexcept { return factorial2_ / (mean_ * mean_); }
  double zero_mass() const noexcept;
  /// Poisson rate, or the mean for other kinds.
  double lambda() const noexcept { return mean_; }
  /// Probability table p_0..p_K. Empty for Poisson laws.
  std::span<const double> weights() const noexcept { return weights_; }
  double probability(std::uint64_t k) const;

  double pgf(double s) const;
  /// order 1 or 2.
  double derivative(double s, int order) const;

  /// g(x) = 1 - f(1 - x), relative accuracy ~1e-15 for every x in [0, 1].
  double survival_gap(double x) const;
  /// f'(1) x - g(x) >= 0, computed without cancellation.
  double linear_excess(double x) const;
  /// log f'(1 - x).
  double log_derivative_at_gap(double x) const;

  /// phi(s) = 1/(1 - f(s)) - 1/(f'(1)(1 - s)) on [0, 1). With `strict`
  /// unset, s = 1 yields the limit nu/2 instead of a domain error.
  double shape(double s, bool strict = true) const;
  /// phi(1 - x) for x in (0, 1]. Returns nu/2 once x < kShapeTaylorGap.
  double shape_at_gap(double x) const;
  static constexpr double kShapeTaylorGap = 1e-8;

  std::uint64_t sample(Rng& rng) const;

  /// JSON-style one-line description, e.g. {"kind":"poisson","lambda":2}.
  std::string describe() const;

  friend bool operator==(const OffspringLaw& a, const OffspringLaw& b) {
    return a.kind_ == b.kind_ && a.mean_ == b.mean_ && a.weights_ == b.weights_;
  }

 private:
  OffspringLaw() = default;
  void finish_table();

  LawKind kind_ = LawKind::finite;
  double mean_ = 1.0;
  double log_mean_ = 0.0;
  double factorial2_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
};

/// Law of J = Binomial(Y, p) given J >= 1, with Y drawn from `base`.
///
/// Finite and binary bases carry an enumerated table over j = 1..K;
/// Poisson bases stay in closed form (zero-truncated Poisson with rate
/// lambda * p).
class ThinnedConditionedLaw {
 public:
  const OffspringLaw& base() const noexcept { return base_; }
  double retention() const noexcept { return retention_; }
  double log_retention() const noexcept { return log_retention_; }
  /// P(J >= 1) before conditioning, i.e. 1 - f(1 - p).
  double normalization() const noexcept { return normalization_; }
  bool poisson_form() const noexcept { return base_.kind() == LawKind::poisson; }
  /// Rate of the truncated Poisson; only meaningful in Poisson form.
  double rate() const noexcept { return rate_; }
  /// weights()[j - 1] = P(J = j) for the enumerated form.
  std::span<const double> weights() const noexcept { return weights_; }

  double probability(std::uint64_t j) const;
  /// P(J >= 2).
  double branching_probability() const noexcept { return branching_; }
  double mean() const;
  /// E[Binomial(Y, p)] reconstructed from the conditioned law; equals p f'(1).
  double unconditioned_mean() const { return normalization_ * mean(); }

  std::uint64_t sample(Rng& rng) const;
  /// Sum of `count` independent draws.
  std::uint64_t sample_sum(std::uint64_t count, Rng& rng) const;

 private:
  friend ThinnedConditionedLaw thin_and_condition_log(const OffspringLaw&, double);
  explicit ThinnedConditionedLaw(OffspringLaw base) : base_(std::move(base)) {}
  std::uint64_t sample_branching(Rng& rng) const;

  OffspringLaw base_;
  double retention_ = 1.0;
  double log_retention_ = 0.0;
  double normalization_ = 1.0;
  double rate_ = 0.0;
  double branching_ = 0.0;
  std::vector<double> weights_;
  std::vector<double> cumulative_;          // over j = 1..K
  std::vector<double> branching_cumulative_;  // over j = 2..K, given J >= 2
};

ThinnedConditionedLaw thin_and_condition(const OffspringLaw& law, double p);
/// Same, with p supplied as log p so that retentions below the double
/// range (survival probabilities of order e^-800) remain exact.
ThinnedConditionedLaw thin_and_condition_log(const OffspringLaw& law, double log_p);

}  // namespace bpve
