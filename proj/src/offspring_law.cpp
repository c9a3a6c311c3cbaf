#include "bpve/offspring_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bpve/errors.hpp"

namespace bpve {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error(std::string(what) + ": argument " + std::to_string(x) +
                            " outside [0, 1]");
  }
}

// 1 - (1 - x)^k
double one_minus_power(double x, double k) {
  if (k == 0.0) return 0.0;
  return -std::expm1(k * std::log1p(-x));
}

// (1 - x)^k - 1 + k x, which is O((k x)^2) and cancels badly when evaluated
// directly; the binomial series is used while k x is small.
double binomial_excess(double x, std::size_t k) {
  if (k < 2 || x == 0.0) return 0.0;
  const double kd = static_cast<double>(k);
  if (kd * x >= 0.25) return std::expm1(kd * std::log1p(-x)) + kd * x;
  double term = 0.5 * kd * (kd - 1.0) * x * x;  // C(k,2) x^2
  double sum = term;
  for (std::size_t j = 2; j < k; ++j) {
    term *= -(kd - static_cast<double>(j)) / static_cast<double>(j + 1) * x;
    sum += term;
    if (std::fabs(term) <= 1e-18 * sum) break;
  }
  return sum;
}

// e^{-y} - 1 + y
double exponential_excess(double y) {
  if (y >= 0.1) return std::expm1(-y) + y;
  double term = 0.5 * y * y;
  double sum = term;
  for (int j = 3; j < 40; ++j) {
    term *= -y / j;
    sum += term;
    if (std::fabs(term) <= 1e-18 * sum) break;
  }
  return sum;
}

// 1 - e^{-a}(1 + a) = P(Poisson(a) >= 2)
double poisson_at_least_two(double a) {
  if (a >= 0.5) return -std::expm1(-a) - a * std::exp(-a);
  // sum_{k>=2} (-1)^k (k-1) a^k / k!
  double power = a;  // a^k / k!
  double sum = 0.0;
  for (int k = 2; k < 60; ++k) {
    power *= a / k;
    const double term = ((k % 2 == 0) ? 1.0 : -1.0) * (k - 1) * power;
    sum += term;
    if (std::fabs(term) <= 1e-18 * sum) break;
  }
  return sum;
}

double log_sum_exp(const std::vector<double>& values) {
  double top = kNegInf;
  for (double v : values) top = std::max(top, v);
  if (top == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - top);
  return top + std::log(acc);
}

double log_binomial(std::size_t n, std::size_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::finite: return "finite";
    case LawKind::poisson: return "poisson";
    case LawKind::binary: return "binary";
  }
  return "unknown";
}

OffspringLaw OffspringLaw::finite(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("finite law: empty weight table");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("finite law: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("finite law: weights sum to " + format_double(total) +
                                ", expected 1");
  }
  for (double& w : weights) w /= total;
  while (weights.size() > 1 && weights.back() == 0.0) weights.pop_back();

  OffspringLaw law;
  law.kind_ = LawKind::finite;
  law.weights_ = std::move(weights);
  law.finish_table();
  return law;
}

OffspringLaw OffspringLaw::binary(double mean) {
  if (!(mean > 0.0 && mean <= 2.0)) {
    throw std::invalid_argument("binary law: mean " + format_double(mean) +
                                " outside (0, 2]");
  }
  OffspringLaw law;
  law.kind_ = LawKind::binary;
  law.weights_ = {1.0 - 0.5 * mean, 0.0, 0.5 * mean};
  law.finish_table();
  law.mean_ = mean;
  law.log_mean_ = std::log(mean);
  law.factorial2_ = mean;
  return law;
}

OffspringLaw OffspringLaw::poisson(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson law: rate " + format_double(lambda) +
                                " must be positive and finite");
  }
  OffspringLaw law;
  law.kind_ = LawKind::poisson;
  law.mean_ = lambda;
  law.log_mean_ = std::log(lambda);
  law.factorial2_ = lambda * lambda;
  return law;
}

void OffspringLaw::finish_table() {
  double mean = 0.0;
  double f2 = 0.0;
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    const double kd = static_cast<double>(k);
    mean += kd * weights_[k];
    f2 += kd * (kd - 1.0) * weights_[k];
  }
  if (!(mean > 0.0)) throw std::invalid_argument("offspring law: mean must be positive");
  mean_ = mean;
  log_mean_ = std::log(mean);
  factorial2_ = f2;
  cumulative_.resize(weights_.size());
  std::partial_sum(weights_.begin(), weights_.end(), cumulative_.begin());
}

double OffspringLaw::zero_mass() const noexcept {
  if (kind_ == LawKind::poisson) return std::exp(-mean_);
  return weights_.front();
}

double OffspringLaw::probability(std::uint64_t k) const {
  if (kind_ == LawKind::poisson) {
    const double kd = static_cast<double>(k);
    return std::exp(kd * log_mean_ - mean_ - std::lgamma(kd + 1.0));
  }
  return k < weights_.size() ? weights_[k] : 0.0;
}

double OffspringLaw::pgf(double s) const {
  require_unit(s, "pgf");
  if (kind_ == LawKind::poisson) return std::exp(mean_ * (s - 1.0));
  double acc = 0.0;
  for (auto it = weights_.rbegin(); it != weights_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

double OffspringLaw::derivative(double s, int order) const {
  require_unit(s, "pgf derivative");
  if (order != 1 && order != 2) {
    throw std::invalid_argument("pgf derivative: unsupported order " + std::to_string(order));
  }
  if (kind_ == LawKind::poisson) {
    return std::pow(mean_, order) * std::exp(mean_ * (s - 1.0));
  }
  double acc = 0.0;
  for (std::size_t k = weights_.size(); k-- > static_cast<std::size_t>(order);) {
    const double kd = static_cast<double>(k);
    const double coeff = order == 1 ? kd : kd * (kd - 1.0);
    acc = acc * s + coeff * weights_[k];
  }
  return acc;
}

double OffspringLaw::survival_gap(double x) const {
  require_unit(x, "survival gap");
  switch (kind_) {
    case LawKind::poisson: return -std::expm1(-mean_ * x);
    case LawKind::binary: return mean_ * x * (1.0 - 0.5 * x);
    case LawKind::finite: break;
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < weights_.size(); ++k) {
    if (weights_[k] > 0.0) acc += weights_[k] * one_minus_power(x, static_cast<double>(k));
  }
  return acc;
}

double OffspringLaw::linear_excess(double x) const {
  require_unit(x, "linear excess");
  switch (kind_) {
    case LawKind::poisson: return exponential_excess(mean_ * x);
    case LawKind::binary: return 0.5 * mean_ * x * x;
    case LawKind::finite: break;
  }
  double acc = 0.0;
  for (std::size_t k = 2; k < weights_.size(); ++k) {
    if (weights_[k] > 0.0) acc += weights_[k] * binomial_excess(x, k);
  }
  return acc;
}

double OffspringLaw::log_derivative_at_gap(double x) const {
  require_unit(x, "log derivative");
  switch (kind_) {
    case LawKind::poisson: return log_mean_ - mean_ * x;
    case LawKind::binary: return log_mean_ + std::log1p(-x);
    case LawKind::finite: break;
  }
  // f'(1-x) = m - sum_k k p_k (1 - (1-x)^{k-1})
  double deficit = 0.0;
  for (std::size_t k = 2; k < weights_.size(); ++k) {
    deficit += static_cast<double>(k) * weights_[k] * one_minus_power(x, static_cast<double>(k - 1));
  }
  const double ratio = deficit / mean_;
  if (ratio < 0.5) return log_mean_ + std::log1p(-ratio);
  double direct = 0.0;
  for (std::size_t k = 1; k < weights_.size(); ++k) {
    direct += static_cast<double>(k) * weights_[k] * std::pow(1.0 - x, static_cast<double>(k - 1));
  }
  return std::log(direct);
}

double OffspringLaw::shape(double s, bool strict) const {
  require_unit(s, "shape function");
  if (s == 1.0) {
    if (strict) throw std::domain_error("shape function: undefined at s = 1");
    return 0.5 * nu();
  }
  return shape_at_gap(1.0 - s);
}

double OffspringLaw::shape_at_gap(double x) const {
  require_unit(x, "shape function");
  if (x < kShapeTaylorGap) return 0.5 * nu();
  const double gap = survival_gap(x);
  return linear_excess(x) / (gap * mean_ * x);
}

std::uint64_t OffspringLaw::sample(Rng& rng) const {
  switch (kind_) {
    case LawKind::poisson: {
      std::poisson_distribution<std::uint64_t> draw(mean_);
      return draw(rng);
    }
    case LawKind::binary: return uniform01(rng) < 0.5 * mean_ ? 2 : 0;
    case LawKind::finite: break;
  }
  const double u = uniform01(rng) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return weights_.size() - 1;
  return static_cast<std::uint64_t>(it - cumulative_.begin());
}

std::string OffspringLaw::describe() const {
  switch (kind_) {
    case LawKind::poisson: return R"({"kind":"poisson","lambda":)" + format_double(mean_) + "}";
    case LawKind::binary: return R"({"kind":"binary","mean":)" + format_double(mean_) + "}";
    case LawKind::finite: break;
  }
  std::string out = R"({"kind":"finite","weights":[)";
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (k) out += ',';
    out += format_double(weights_[k]);
  }
  return out + "]}";
}

// ---------------------------------------------------------------------------

ThinnedConditionedLaw thin_and_condition(const OffspringLaw& law, double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::domain_error("thin_and_condition: retention probability must lie in (0, 1]");
  }
  return thin_and_condition_log(law, std::log(p));
}

ThinnedConditionedLaw thin_and_condition_log(const OffspringLaw& law, double log_p) {
  if (!(log_p <= 0.0) || !std::isfinite(log_p)) {
    throw std::domain_error("thin_and_condition: retention probability must lie in (0, 1]");
  }
  ThinnedConditionedLaw out(law);
  const double p = std::exp(log_p);
  out.retention_ = p;
  out.log_retention_ = log_p;
  out.normalization_ = law.survival_gap(p);

  if (law.kind() == LawKind::poisson) {
    const double a = std::exp(law.log_mean() + log_p);
    out.rate_ = a;
    out.branching_ = a > 0.0 ? poisson_at_least_two(a) / -std::expm1(-a) : 0.0;
    return out;
  }

  const auto table = law.weights();
  const std::size_t top = table.size() - 1;
  const double log_q = std::log1p(-p);
  std::vector<double> log_w(top, kNegInf);
  std::vector<double> terms;
  for (std::size_t j = 1; j <= top; ++j) {
    terms.clear();
    for (std::size_t z = j; z <= top; ++z) {
      if (table[z] <= 0.0) continue;
      double t = std::log(table[z]) + log_binomial(z, j) + static_cast<double>(j) * log_p;
      if (z > j) t += static_cast<double>(z - j) * log_q;
      terms.push_back(t);
    }
    log_w[j - 1] = log_sum_exp(terms);
  }
  const double log_total = log_sum_exp(log_w);
  out.weights_.resize(top);
  for (std::size_t j = 0; j < top; ++j) out.weights_[j] = std::exp(log_w[j] - log_total);
  while (out.weights_.size() > 1 && out.weights_.back() == 0.0) out.weights_.pop_back();

  out.cumulative_.resize(out.weights_.size());
  std::partial_sum(out.weights_.begin(), out.weights_.end(), out.cumulative_.begin());
  double branching = 0.0;
  for (std::size_t j = 1; j < out.weights_.size(); ++j) branching += out.weights_[j];
  out.branching_ = branching;
  if (out.weights_.size() > 1) {
    out.branching_cumulative_.assign(out.weights_.begin() + 1, out.weights_.end());
    std::partial_sum(out.branching_cumulative_.begin(), out.branching_cumulative_.end(),
                     out.branching_cumulative_.begin());
  }
  return out;
}

double ThinnedConditionedLaw::probability(std::uint64_t j) const {
  if (j == 0) return 0.0;
  if (!poisson_form()) return j <= weights_.size() ? weights_[j - 1] : 0.0;
  const double a = rate_;
  if (a == 0.0) return j == 1 ? 1.0 : 0.0;
  const double jd = static_cast<double>(j);
  return std::exp(jd * std::log(a) - a - std::lgamma(jd + 1.0) - std::log(-std::expm1(-a)));
}

double ThinnedConditionedLaw::mean() const {
  if (poisson_form()) {
    return rate_ == 0.0 ? 1.0 : rate_ / -std::expm1(-rate_);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) acc += static_cast<double>(j + 1) * weights_[j];
  return acc;
}

std::uint64_t ThinnedConditionedLaw::sample(Rng& rng) const {
  if (!poisson_form()) {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) return weights_.size();
    return static_cast<std::uint64_t>(it - cumulative_.begin()) + 1;
  }
  const double a = rate_;
  if (a > 30.0) {
    std::poisson_distribution<std::uint64_t> draw(a);
    for (;;) {
      const auto j = draw(rng);
      if (j >= 1) return j;
    }
  }
  const double u = uniform01(rng);
  double pj = probability(1);
  double cum = pj;
  std::uint64_t j = 1;
  while (u >= cum && pj > 0.0) {
    ++j;
    pj *= a / static_cast<double>(j);
    cum += pj;
  }
  return j;
}

std::uint64_t ThinnedConditionedLaw::sample_branching(Rng& rng) const {
  if (!poisson_form()) {
    const double u = uniform01(rng) * branching_cumulative_.back();
    const auto it = std::upper_bound(branching_cumulative_.begin(), branching_cumulative_.end(), u);
    if (it == branching_cumulative_.end()) return weights_.size();
    return static_cast<std::uint64_t>(it - branching_cumulative_.begin()) + 2;
  }
  const double a = rate_;
  if (a > 30.0) {
    std::poisson_distribution<std::uint64_t> draw(a);
    for (;;) {
      const auto j = draw(rng);
      if (j >= 2) return j;
    }
  }
  // P(J = j | J >= 2) = e^{-a} a^j / (j! h(a))
  const double u = uniform01(rng);
  double pj = std::exp(2.0 * std::log(a) - a - std::log(2.0) - std::log(poisson_at_least_two(a)));
  double cum = pj;
  std::uint64_t j = 2;
  while (u >= cum && pj > 0.0) {
    ++j;
    pj *= a / static_cast<double>(j);
    cum += pj;
  }
  return j;
}

std::uint64_t ThinnedConditionedLaw::sample_sum(std::uint64_t count, Rng& rng) const {
  if (count < 16) {
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < count; ++i) total += sample(rng);
    return total;
  }
  // Most draws equal 1; only the branching ones need an explicit value.
  std::binomial_distribution<std::uint64_t> branching(count, branching_);
  const std::uint64_t b = branching_ > 0.0 ? branching(rng) : 0;
  std::uint64_t total = count;
  for (std::uint64_t i = 0; i < b; ++i) total += sample_branching(rng) - 1;
  return total;
}

}  // namespace bpve
