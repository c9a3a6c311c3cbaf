#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace bpve {

/// Either sorted real samples (continuous mode) or an integer count table
/// (discrete mode).
class EmpiricalLaw {
 public:
  static EmpiricalLaw continuous(std::vector<double> samples);
  static EmpiricalLaw discrete(std::span<const std::uint64_t> samples);
  static EmpiricalLaw from_counts(std::map<std::uint64_t, std::uint64_t> counts);

  bool is_discrete() const noexcept { return discrete_; }
  std::size_t size() const noexcept { return size_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }
  double frequency(std::uint64_t j) const;
  double mean() const;
  /// Smallest x with F(x) >= q.
  double quantile(double q) const;

 private:
  bool discrete_ = false;
  std::size_t size_ = 0;
  std::vector<double> samples_;
  std::map<std::uint64_t, std::uint64_t> counts_;
};

struct ContinuousReference {
  enum class Kind { exponential, uniform };
  Kind kind = Kind::exponential;
  double a = 1.0;  // rate, or lower end
  double b = 0.0;  // upper end (uniform)

  static ContinuousReference exponential(double rate);
  static ContinuousReference uniform(double lo, double hi);
  double cdf(double x) const;
};

/// sup_x |F_emp(x) - F(x)|, both one-sided limits at every sample point.
/// With `window`, the supremum is restricted to x in [lo, hi].
double ks_distance(const EmpiricalLaw& law, const ContinuousReference& reference,
                   std::optional<std::pair<double, double>> window = std::nullopt);

/// Law on the nonnegative integers described by its mass function and its
/// upper tail P(X > j).
struct IntegerLaw {
  std::function<double(std::uint64_t)> pmf;
  std::function<double(std::uint64_t)> upper_tail;

  /// P(j) = q (1 - q)^{j - 1}, j >= 1.
  static IntegerLaw geometric(double success);
  static IntegerLaw point_mass(std::uint64_t at);
  static IntegerLaw table(std::map<std::uint64_t, double> masses);
};

/// (1/2) sum_j |a(j) - b(j)|, with b's mass beyond the largest observed value
/// added in full.
double tv_distance(const EmpiricalLaw& a, const IntegerLaw& b);
double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b);

/// max_k |a_k - b_k|.
double max_cdf_gap(std::span<const double> a, std::span<const double> b);

/// Pearson statistic over bins {lo, ..., hi - 1, >= hi}.
double chi_square_statistic(const EmpiricalLaw& law, const IntegerLaw& reference,
                            std::uint64_t lo, std::uint64_t hi);

}  // namespace bpve
