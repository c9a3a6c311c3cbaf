#include "bpve/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>

namespace bpve {

EmpiricalLaw EmpiricalLaw::continuous(std::vector<double> samples) {
  EmpiricalLaw law;
  std::sort(samples.begin(), samples.end());
  law.size_ = samples.size();
  law.samples_ = std::move(samples);
  return law;
}

EmpiricalLaw EmpiricalLaw::discrete(std::span<const std::uint64_t> samples) {
  std::map<std::uint64_t, std::uint64_t> counts;
  for (auto s : samples) ++counts[s];
  return from_counts(std::move(counts));
}

EmpiricalLaw EmpiricalLaw::from_counts(std::map<std::uint64_t, std::uint64_t> counts) {
  EmpiricalLaw law;
  law.discrete_ = true;
  for (const auto& [j, c] : counts) law.size_ += c;
  law.counts_ = std::move(counts);
  return law;
}

double EmpiricalLaw::frequency(std::uint64_t j) const {
  if (size_ == 0) return 0.0;
  const auto it = counts_.find(j);
  return it == counts_.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(size_);
}

double EmpiricalLaw::mean() const {
  if (size_ == 0) throw std::invalid_argument("mean of an empty sample");
  double acc = 0.0;
  if (discrete_) {
    for (const auto& [j, c] : counts_) acc += static_cast<double>(j) * static_cast<double>(c);
  } else {
    acc = std::accumulate(samples_.begin(), samples_.end(), 0.0);
  }
  return acc / static_cast<double>(size_);
}

double EmpiricalLaw::quantile(double q) const {
  if (size_ == 0) throw std::invalid_argument("quantile of an empty sample");
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(size_)));
  const std::size_t idx = rank == 0 ? 0 : rank - 1;
  if (!discrete_) return samples_[std::min(idx, size_ - 1)];
  std::size_t seen = 0;
  for (const auto& [j, c] : counts_) {
    seen += c;
    if (seen > idx) return static_cast<double>(j);
  }
  return static_cast<double>(counts_.rbegin()->first);
}

ContinuousReference ContinuousReference::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential reference: rate must be positive");
  return {Kind::exponential, rate, 0.0};
}

ContinuousReference ContinuousReference::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("uniform reference: empty interval");
  return {Kind::uniform, lo, hi};
}

double ContinuousReference::cdf(double x) const {
  if (kind == Kind::exponential) return x <= 0.0 ? 0.0 : -std::expm1(-a * x);
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  return (x - a) / (b - a);
}

double ks_distance(const EmpiricalLaw& law, const ContinuousReference& reference,
                   std::optional<std::pair<double, double>> window) {
  if (law.is_discrete()) throw std::invalid_argument("ks_distance: continuous sample required");
  const auto& x = law.samples();
  if (x.size() < 2) throw std::invalid_argument("ks_distance: at least two samples required");
  const double lo = window ? window->first : -HUGE_VAL;
  const double hi = window ? window->second : HUGE_VAL;
  const double m = static_cast<double>(x.size());

  double d = 0.0;
  std::size_t i = 0;
  while (i < x.size()) {
    std::size_t j = i;
    while (j < x.size() && x[j] == x[i]) ++j;
    if (x[i] >= lo && x[i] <= hi) {
      const double f = reference.cdf(x[i]);
      d = std::max({d, std::fabs(static_cast<double>(i) / m - f),
                    std::fabs(static_cast<double>(j) / m - f)});
    }
    i = j;
  }
  if (window) {
    // The empirical CDF is flat between samples, so the window edges are
    // the only other candidates.
    const auto below_lo = std::lower_bound(x.begin(), x.end(), lo) - x.begin();
    const auto upto_hi = std::upper_bound(x.begin(), x.end(), hi) - x.begin();
    d = std::max({d, std::fabs(static_cast<double>(below_lo) / m - reference.cdf(lo)),
                  std::fabs(static_cast<double>(upto_hi) / m - reference.cdf(hi))});
  }
  return std::min(d, 1.0);
}

IntegerLaw IntegerLaw::geometric(double success) {
  if (!(success > 0.0 && success <= 1.0)) {
    throw std::invalid_argument("geometric law: success probability outside (0, 1]");
  }
  const double fail = 1.0 - success;
  return {[=](std::uint64_t j) {
            return j == 0 ? 0.0 : success * std::pow(fail, static_cast<double>(j - 1));
          },
          [=](std::uint64_t j) { return std::pow(fail, static_cast<double>(j)); }};
}

IntegerLaw IntegerLaw::point_mass(std::uint64_t at) {
  return {[=](std::uint64_t j) { return j == at ? 1.0 : 0.0; },
          [=](std::uint64_t j) { return j < at ? 1.0 : 0.0; }};
}

IntegerLaw IntegerLaw::table(std::map<std::uint64_t, double> masses) {
  auto shared = std::make_shared<const std::map<std::uint64_t, double>>(std::move(masses));
  return {[shared](std::uint64_t j) {
            const auto it = shared->find(j);
            return it == shared->end() ? 0.0 : it->second;
          },
          [shared](std::uint64_t j) {
            double tail = 0.0;
            for (auto it = shared->upper_bound(j); it != shared->end(); ++it) tail += it->second;
            return tail;
          }};
}

double tv_distance(const EmpiricalLaw& a, const IntegerLaw& b) {
  if (!a.is_discrete()) throw std::invalid_argument("tv_distance: discrete sample required");
  if (a.size() == 0) throw std::invalid_argument("tv_distance: empty sample");
  const std::uint64_t top = a.counts().rbegin()->first;
  double acc = 0.0;
  for (std::uint64_t j = 0; j <= top; ++j) acc += std::fabs(a.frequency(j) - b.pmf(j));
  acc += b.upper_tail(top);
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

double tv_distance(const EmpiricalLaw& a, const EmpiricalLaw& b) {
  if (!a.is_discrete() || !b.is_discrete()) {
    throw std::invalid_argument("tv_distance: discrete samples required");
  }
  std::set<std::uint64_t> support;
  for (const auto& [j, c] : a.counts()) support.insert(j);
  for (const auto& [j, c] : b.counts()) support.insert(j);
  double acc = 0.0;
  for (auto j : support) acc += std::fabs(a.frequency(j) - b.frequency(j));
  return std::clamp(0.5 * acc, 0.0, 1.0);
}

double max_cdf_gap(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("max_cdf_gap: length mismatch");
  double gap = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::fabs(a[k] - b[k]));
  return gap;
}

double chi_square_statistic(const EmpiricalLaw& law, const IntegerLaw& reference,
                            std::uint64_t lo, std::uint64_t hi) {
  if (!law.is_discrete() || law.size() == 0) {
    throw std::invalid_argument("chi_square_statistic: nonempty discrete sample required");
  }
  const double m = static_cast<double>(law.size());
  double stat = 0.0;
  double observed_rest = m;
  for (std::uint64_t j = lo; j < hi; ++j) {
    const double observed = law.frequency(j) * m;
    const double expected = reference.pmf(j) * m;
    observed_rest -= observed;
    stat += (observed - expected) * (observed - expected) / expected;
  }
  const double expected_rest = reference.upper_tail(hi - 1) * m;
  stat += (observed_rest - expected_rest) * (observed_rest - expected_rest) / expected_rest;
  return stat;
}

}  // namespace bpve
