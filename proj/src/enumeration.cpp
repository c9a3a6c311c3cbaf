#include "bpve/enumeration.hpp"

#include <algorithm>
#include <stdexcept>

#include "bpve/errors.hpp"

namespace bpve {
namespace {

// Signature of an individual in generation k: descendant counts in
// generations k+1..n followed by reduced counts in the same generations.
using Signature = std::vector<std::uint32_t>;
using SignatureLaw = std::map<Signature, double>;

void check_budget(const SignatureLaw& law, std::size_t budget) {
  if (law.size() > budget) {
    throw BudgetExceeded("enumerate_small: more than " + std::to_string(budget) +
                         " genealogy states");
  }
}

SignatureLaw convolve(const SignatureLaw& a, const SignatureLaw& b, std::size_t width,
                      std::size_t cap, std::size_t budget, bool& cap_bound) {
  SignatureLaw out;
  Signature sum(2 * width);
  for (const auto& [sa, pa] : a) {
    for (const auto& [sb, pb] : b) {
      bool over = false;
      for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] = sa[i] + sb[i];
        if (i < width && sum[i] > cap) over = true;
      }
      if (over) {
        cap_bound = true;
      } else {
        out[sum] += pa * pb;
      }
    }
    check_budget(out, budget);
  }
  return out;
}

}  // namespace

std::optional<std::size_t> EnumeratedOutcome::mrca_generation() const {
  if (!survives()) return std::nullopt;
  std::size_t g = 0;
  for (std::size_t k = 0; k < reduced.size(); ++k) {
    if (reduced[k] == 1) g = k;
  }
  return g;
}

double EnumerationResult::survival_probability() const {
  double p = 0.0;
  for (const auto& o : outcomes) {
    if (o.survives()) p += o.probability;
  }
  return p;
}

double EnumerationResult::mrca_tail(std::size_t k) const {
  double hit = 0.0;
  for (const auto& o : outcomes) {
    if (auto g = o.mrca_generation(); g && *g >= k) hit += o.probability;
  }
  return hit / survival_probability();
}

std::vector<double> EnumerationResult::mrca_law() const {
  std::vector<double> law(horizon + 1, 0.0);
  const double s = survival_probability();
  for (const auto& o : outcomes) {
    if (auto g = o.mrca_generation()) law[*g] += o.probability / s;
  }
  return law;
}

std::map<std::uint32_t, double> EnumerationResult::reduced_law(std::size_t k) const {
  std::map<std::uint32_t, double> law;
  const double s = survival_probability();
  for (const auto& o : outcomes) {
    if (o.survives()) law[o.reduced.at(k)] += o.probability / s;
  }
  return law;
}

double EnumerationResult::conditional_mean() const {
  double acc = 0.0;
  for (const auto& o : outcomes) acc += o.probability * o.population.back();
  return acc / survival_probability();
}

EnumerationResult enumerate_small(const Environment& env, std::size_t n, std::size_t cap,
                                  std::size_t budget) {
  if (n < 1 || n > kMaxEnumerationHorizon) {
    throw std::invalid_argument("enumerate_small: horizon must lie in [1, 8]");
  }
  if (cap < 1 || cap > kMaxEnumerationCap) {
    throw std::invalid_argument("enumerate_small: population cap must lie in [1, 64]");
  }
  for (std::size_t k = 1; k <= n; ++k) {
    if (env.law_at(k).kind() == LawKind::poisson) {
      throw std::invalid_argument("enumerate_small: generation " + std::to_string(k) +
                                  " has unbounded support");
    }
  }

  bool cap_bound = false;
  // An individual of generation n has the empty signature.
  SignatureLaw individual{{Signature{}, 1.0}};
  for (std::size_t k = n; k-- > 0;) {
    const std::size_t child_width = n - k - 1;
    const std::size_t width = n - k;
    // Contribution of one child (generation k+1) to its parent's signature.
    SignatureLaw child;
    for (const auto& [s, p] : individual) {
      Signature c(2 * width, 0);
      const bool alive = child_width == 0 || s[child_width - 1] > 0;
      c[0] = 1;
      c[width] = alive ? 1 : 0;
      for (std::size_t i = 0; i < child_width; ++i) {
        c[1 + i] = s[i];
        c[width + 1 + i] = s[child_width + i];
      }
      child[c] += p;
    }

    const auto weights = env.law_at(k + 1).weights();
    SignatureLaw next;
    SignatureLaw power{{Signature(2 * width, 0), 1.0}};
    for (std::size_t y = 0; y < weights.size(); ++y) {
      if (y > 0) power = convolve(power, child, width, cap, budget, cap_bound);
      if (weights[y] > 0.0) {
        for (const auto& [s, p] : power) next[s] += weights[y] * p;
      }
      if (power.empty()) break;
    }
    check_budget(next, budget);
    individual = std::move(next);
  }

  EnumerationResult r;
  r.horizon = n;
  r.cap = cap;
  double total = 0.0;
  for (const auto& [s, p] : individual) {
    EnumeratedOutcome o;
    o.population.assign(n + 1, 1);
    o.reduced.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      o.population[i + 1] = s[i];
      o.reduced[i + 1] = s[n + i];
    }
    o.reduced[0] = o.population[n] > 0 ? 1 : 0;
    o.probability = p;
    total += p;
    r.outcomes.push_back(std::move(o));
  }
  r.truncated_mass = cap_bound ? std::max(0.0, 1.0 - total) : 0.0;
  return r;
}

}  // namespace bpve
