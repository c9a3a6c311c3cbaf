#include "bpve/moments.hpp"

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

// exp(a - b) with the conventions 0/0 = 1 and x/0 = inf
double log_ratio(double a, double b) {
  if (a == kNegInf && b == kNegInf) return 1.0;
  return std::exp(a - b);
}

// Smallest integer y with sum_{k > y} k^2 p_k <= eps * S, given the table of
// k^2 p_k over 0..K.
std::size_t smallest_threshold(const std::vector<double>& second, double bound) {
  std::vector<double> suffix(second.size() + 1, 0.0);
  for (std::size_t k = second.size(); k-- > 0;) suffix[k] = suffix[k + 1] + second[k];
  for (std::size_t y = 0; y < second.size(); ++y) {
    if (suffix[y + 1] <= bound) return y;
  }
  return second.size();
}

}  // namespace

double MomentTable::mu(std::size_t k) const { return std::exp(log_mu.at(k)); }

bool MomentTable::rho_finite() const noexcept { return std::isfinite(rho.back()); }

double MomentTable::rho_ratio(std::size_t k) const {
  if (rho_finite()) return rho.back() > 0.0 ? rho.at(k) / rho.back() : 0.0;
  return std::exp(log_rho.at(k) - log_rho.back());
}

MomentTable moment_table(const Environment& env, std::size_t n) {
  MomentTable t;
  t.horizon = n;
  t.mean.assign(n + 1, 1.0);
  t.nu.assign(n + 1, 0.0);
  t.log_mu.assign(n + 1, 0.0);
  t.rho.assign(n + 1, 0.0);
  t.log_rho.assign(n + 1, kNegInf);
  for (std::size_t k = 1; k <= n; ++k) {
    const OffspringLaw& law = env.law_at(k);
    t.mean[k] = law.mean();
    t.nu[k] = law.nu();
    t.log_mu[k] = t.log_mu[k - 1] + law.log_mean();
    const double log_increment = std::log(t.nu[k]) - t.log_mu[k - 1];
    t.rho[k] = t.rho[k - 1] + std::exp(log_increment);
    t.log_rho[k] = log_add_exp(t.log_rho[k - 1], log_increment);
    if (!std::isfinite(t.log_mu[k]) || std::isnan(t.log_rho[k]) || t.log_rho[k] == HUGE_VAL) {
      throw NumericError("moment table: rho increment out of floating-point range", k);
    }
  }
  return t;
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::looks_critical: return "looks-critical";
    case Verdict::looks_subcritical: return "looks-subcritical";
    case Verdict::looks_supercritical_or_degenerate: return "looks-supercritical-or-degenerate";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict verdict_from(double rho_growth, double mu_rho_growth, double rho_n) {
  if (rho_growth >= kCriticalGrowth && mu_rho_growth >= kCriticalGrowth &&
      rho_n >= kCriticalMinRho) {
    return Verdict::looks_critical;
  }
  if (rho_growth < kStallGrowth) return Verdict::looks_supercritical_or_degenerate;
  if (mu_rho_growth < kStallGrowth) return Verdict::looks_subcritical;
  return Verdict::inconclusive;
}

double star_constant(const OffspringLaw& law, double epsilon) {
  if (!(epsilon > 0.0)) throw std::domain_error("star_constant: epsilon must be positive");
  const double scale = 1.0 + law.mean();

  if (law.kind() == LawKind::binary) {
    // Y in {0, 2}: the whole mass sits at 2, so the threshold must reach 2
    // unless eps >= 1.
    return epsilon >= 1.0 ? 0.0 : 2.0 / scale;
  }

  std::vector<double> second;
  if (law.kind() == LawKind::poisson) {
    const double lambda = law.mean();
    const auto top = static_cast<std::size_t>(lambda + 20.0 * std::sqrt(lambda) + 40.0);
    second.resize(top + 1);
    for (std::size_t k = 0; k <= top; ++k) {
      second[k] = static_cast<double>(k * k) * law.probability(k);
    }
  } else {
    const auto w = law.weights();
    second.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) second[k] = static_cast<double>(k * k) * w[k];
  }
  double total = 0.0;
  for (std::size_t k = 2; k < second.size(); ++k) total += second[k];
  return static_cast<double>(smallest_threshold(second, epsilon * total)) / scale;
}

CriticalityReport classify(const MomentTable& table, const Environment& env) {
  const std::size_t n = table.horizon;
  if (n < kMinClassifyHorizon) {
    throw std::invalid_argument("classify: horizon " + std::to_string(n) + " below " +
                                std::to_string(kMinClassifyHorizon));
  }
  CriticalityReport r;
  r.horizon = n;
  r.rho_n = table.rho[n];
  r.log_rho_n = table.log_rho[n];
  r.log_mu_rho_n = table.log_mu[n] + table.log_rho[n];
  r.mu_rho_n = std::exp(r.log_mu_rho_n);
  for (std::size_t k = n; k >= 1; k /= 2) {
    r.checkpoints.push_back({k, table.log_rho[k], table.log_mu[k] + table.log_rho[k]});
  }
  const std::size_t half = n / 2;
  r.rho_growth = log_ratio(table.log_rho[n], table.log_rho[half]);
  r.mu_rho_growth = log_ratio(table.log_mu[n] + table.log_rho[n],
                              table.log_mu[half] + table.log_rho[half]);
  r.verdict = verdict_from(r.rho_growth, r.mu_rho_growth, std::exp(r.log_rho_n));

  for (std::size_t i = 0; i < kStarEpsilons.size(); ++i) {
    StarDiagnostic d{kStarEpsilons[i], 0.0, 1};
    // Generated schedules repeat the same law kind with slowly moving
    // parameters; the scan is still done for every generation.
    for (std::size_t k = 1; k <= n; ++k) {
      const double c = star_constant(env.law_at(k), d.epsilon);
      if (c > d.max_constant) {
        d.max_constant = c;
        d.argmax_generation = k;
      }
    }
    r.star[i] = d;
  }
  return r;
}

std::size_t time_change(const MomentTable& table, double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::domain_error("time_change: t outside [0, 1)");
  const std::size_t n = table.horizon;
  if (n == 0 || table.log_rho[n] == kNegInf) {
    throw std::domain_error("time_change: degenerate table with rho_n = 0");
  }
  std::size_t k = 0;
  if (table.rho_finite()) {
    const double level = t * table.rho[n];
    k = static_cast<std::size_t>(std::upper_bound(table.rho.begin(), table.rho.end(), level) -
                                 table.rho.begin()) - 1;
  } else {
    const double level = std::log(t) + table.log_rho[n];
    k = static_cast<std::size_t>(
            std::upper_bound(table.log_rho.begin(), table.log_rho.end(), level) -
            table.log_rho.begin()) - 1;
  }
  return std::min(k, n - 1);
}

}  // namespace bpve
