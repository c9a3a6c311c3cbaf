#include "bpve/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bpve/errors.hpp"

namespace bpve {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_horizon(const Environment& env, std::size_t n) {
  if (n < 1) throw std::invalid_argument("horizon must be at least 1");
  if (n > env.horizon()) {
    throw std::out_of_range("horizon " + std::to_string(n) + " exceeds environment horizon " +
                            std::to_string(env.horizon()));
  }
}

void require_curve(const SurvivalCurve& curve, const MomentTable& table) {
  if (curve.horizon != table.horizon) {
    throw std::invalid_argument("survival curve and moment table horizons differ");
  }
}

}  // namespace

SurvivalCurve survival_curve(const Environment& env, std::size_t n) {
  require_horizon(env, n);
  SurvivalCurve c;
  c.horizon = n;
  c.log_u.assign(n + 1, 0.0);
  c.u.assign(n + 1, 1.0);
  double log_r = 0.0;  // log(1/u_k)
  for (std::size_t k = n; k >= 1; --k) {
    const OffspringLaw& law = env.law_at(k);
    const double gap = std::min(1.0, std::exp(-log_r));
    const double phi = law.shape_at_gap(gap);
    if (!(phi >= 0.0)) throw NumericError("survival curve: negative shape function", k);
    log_r = log_add_exp(log_r - law.log_mean(), std::log(phi));
    if (!std::isfinite(log_r)) throw NumericError("survival curve: non-finite reciprocal", k);
    // u_{k-1} <= 1 always; clamp rounding above it.
    log_r = std::max(log_r, 0.0);
    c.log_u[k - 1] = -log_r;
    c.u[k - 1] = std::exp(-log_r);
  }
  return c;
}

SurvivalCurve survival_curve_by_iteration(const Environment& env, std::size_t n) {
  require_horizon(env, n);
  SurvivalCurve c;
  c.horizon = n;
  c.u.assign(n + 1, 1.0);
  c.log_u.assign(n + 1, 0.0);
  for (std::size_t k = n; k >= 1; --k) {
    c.u[k - 1] = env.law_at(k).survival_gap(c.u[k]);
    c.log_u[k - 1] = std::log(c.u[k - 1]);
  }
  return c;
}

double survival_via_shape_identity(const Environment& env, const SurvivalCurve& curve,
                                   const MomentTable& table) {
  require_curve(curve, table);
  const std::size_t n = curve.horizon;
  std::vector<double> terms;
  terms.reserve(n + 1);
  terms.push_back(-table.log_mu[n]);
  for (std::size_t k = 1; k <= n; ++k) {
    const double phi = env.law_at(k).shape_at_gap(std::clamp(curve.u[k], 0.0, 1.0));
    if (phi > 0.0) terms.push_back(std::log(phi) - table.log_mu[k - 1]);
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  const double log_inverse = top + std::log(acc);
  if (!std::isfinite(log_inverse)) throw NumericError("shape identity: non-finite sum", n);
  return std::exp(-log_inverse);
}

double survival_via_shape_identity(const Environment& env, std::size_t n) {
  return survival_via_shape_identity(env, survival_curve(env, n), moment_table(env, n));
}

MrcaDistribution mrca_distribution(const Environment& env, const SurvivalCurve& curve,
                                   const MomentTable& table) {
  require_curve(curve, table);
  const std::size_t n = curve.horizon;
  MrcaDistribution d;
  d.horizon = n;
  d.log_tail.assign(n + 1, 0.0);
  d.tail.assign(n + 1, 1.0);
  d.cdf.assign(n + 1, 1.0);
  d.reference.assign(n + 1, 0.0);

  double log_product = 0.0;  // sum_{i<=k} log f_i'(1 - u_i)
  for (std::size_t k = 1; k <= n; ++k) {
    log_product += env.law_at(k).log_derivative_at_gap(std::clamp(curve.u[k], 0.0, 1.0));
    double lt = curve.log_u[k] + log_product - curve.log_u[0];
    if (std::isnan(lt)) throw NumericError("mrca distribution: NaN tail", k);
    // Convexity gives u_k f_k'(1-u_k) <= u_{k-1}; only rounding can break it.
    lt = std::min(lt, d.log_tail[k - 1]);
    d.log_tail[k] = lt;
    d.tail[k] = std::exp(lt);
  }
  for (std::size_t k = 0; k < n; ++k) d.cdf[k] = 1.0 - d.tail[k + 1];
  for (std::size_t k = 0; k <= n; ++k) d.reference[k] = table.rho_ratio(k);
  return d;
}

MrcaDistribution mrca_distribution(const Environment& env, std::size_t n) {
  return mrca_distribution(env, survival_curve(env, n), moment_table(env, n));
}

ConditionalMean conditional_mean(const SurvivalCurve& curve, const MomentTable& table) {
  require_curve(curve, table);
  const std::size_t n = curve.horizon;
  ConditionalMean m;
  m.exact = std::exp(table.log_mu[n] - curve.log_u[0]);
  m.kolmogorov_proxy = 0.5 * std::exp(table.log_mu[n] + table.log_rho[n]);
  return m;
}

ConditionalMean conditional_mean(const Environment& env, std::size_t n) {
  return conditional_mean(survival_curve(env, n), moment_table(env, n));
}

}  // namespace bpve
