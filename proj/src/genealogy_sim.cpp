#include "bpve/genealogy_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "bpve/errors.hpp"

namespace bpve {
namespace {

void require_horizon(std::span<const ReducedPath> paths, const MomentTable& table) {
  for (const auto& p : paths) {
    if (p.horizon() != table.horizon) {
      throw std::invalid_argument("reduced path horizon " + std::to_string(p.horizon()) +
                                  " does not match moment table horizon " +
                                  std::to_string(table.horizon));
    }
  }
}

}  // namespace

std::size_t ReducedPath::mrca_generation() const {
  std::size_t g = 0;
  for (std::size_t k = 0; k < z.size() && z[k] == 1; ++k) g = k;
  return g;
}

bool ReducedPath::well_formed() const {
  if (z.empty() || z.front() != 1 || z.back() < 1) return false;
  for (std::size_t k = 1; k < z.size(); ++k) {
    if (z[k] < z[k - 1]) return false;
  }
  return true;
}

void check_path_shape(const ReducedPath& path) {
  if (!path.well_formed()) throw InvariantViolation("reduced path violates z[0]=1, monotone, z[n]>=1");
}

std::vector<JumpTime> jump_times(const ReducedPath& path, const MomentTable& table) {
  if (path.horizon() != table.horizon) throw std::invalid_argument("jump_times: horizon mismatch");
  std::vector<JumpTime> jumps;
  for (std::size_t k = 1; k <= path.horizon(); ++k) {
    if (path.z[k] == path.z[k - 1]) continue;
    const double t = table.rho_ratio(k);
    if (t >= 1.0) break;
    jumps.push_back({t, path.z[k]});
  }
  return jumps;
}

ReducedForestSampler::ReducedForestSampler(const Environment& env, const SurvivalCurve& curve,
                                           std::uint64_t progeny_cap)
    : cap_(progeny_cap) {
  const std::size_t n = curve.horizon;
  if (n < 1) throw std::invalid_argument("reduced sampler: horizon must be at least 1");
  steps_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    steps_.push_back(thin_and_condition_log(env.law_at(k + 1), curve.log_u[k + 1]));
  }
}

ReducedPath ReducedForestSampler::sample(Rng& rng) const {
  ReducedPath path;
  path.z.resize(steps_.size() + 1);
  path.z[0] = 1;
  std::uint64_t progeny = 1;
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    path.z[k + 1] = steps_[k].sample_sum(path.z[k], rng);
    progeny += path.z[k + 1];
    if (progeny > cap_) throw NumericError("reduced sampler: progeny cap exceeded", k + 1);
  }
  return path;
}

ReducedPath sample_reduced_path(const Environment& env, const SurvivalCurve& curve, Rng& rng) {
  return ReducedForestSampler(env, curve).sample(rng);
}

RejectionResult sample_rejection(const Environment& env, std::size_t n, Rng& rng,
                                 std::uint64_t max_attempts, std::uint64_t progeny_cap) {
  if (n < 1) throw std::invalid_argument("rejection sampler: horizon must be at least 1");
  RejectionResult result;
  // offspring[k][i]: number of children of individual i in generation k.
  std::vector<std::vector<std::uint32_t>> offspring(n);
  while (result.attempts < max_attempts) {
    ++result.attempts;
    std::uint64_t population = 1;
    std::uint64_t progeny = 1;
    bool extinct = false;
    for (std::size_t k = 0; k < n; ++k) {
      auto& row = offspring[k];
      row.resize(population);
      const OffspringLaw& law = env.law_at(k + 1);
      std::uint64_t next = 0;
      for (auto& y : row) {
        y = static_cast<std::uint32_t>(law.sample(rng));
        next += y;
      }
      progeny += next;
      if (progeny > progeny_cap) {
        throw NumericError("rejection sampler: progeny cap exceeded", k + 1);
      }
      population = next;
      if (population == 0) {
        extinct = true;
        break;
      }
    }
    if (extinct) continue;

    // Back-mark: an individual is reduced iff one of its children is.
    ReducedPath path;
    path.z.assign(n + 1, 0);
    path.z[n] = population;
    std::vector<char> alive(population, 1);
    for (std::size_t k = n; k-- > 0;) {
      const auto& row = offspring[k];
      std::vector<char> parent(row.size(), 0);
      std::size_t child = 0;
      std::uint64_t count = 0;
      for (std::size_t i = 0; i < row.size(); ++i) {
        for (std::uint32_t c = 0; c < row[i]; ++c, ++child) {
          if (alive[child]) parent[i] = 1;
        }
        count += parent[i];
      }
      path.z[k] = count;
      alive = std::move(parent);
    }
    result.path = std::move(path);
    return result;
  }
  return result;
}

std::uint64_t YulePath::value(double u) const {
  std::uint64_t v = 1;
  for (double t : jumps) {
    if (t > u) break;
    ++v;
  }
  return v;
}

YulePath sample_yule(double u_max, Rng& rng) {
  if (!(u_max >= 0.0)) throw std::domain_error("sample_yule: negative time horizon");
  YulePath path;
  path.horizon = u_max;
  double t = 0.0;
  for (std::uint64_t j = 1;; ++j) {
    // Minimum of j standard exponentials.
    t += -std::log1p(-uniform01(rng)) / static_cast<double>(j);
    if (t > u_max) break;
    path.jumps.push_back(t);
  }
  return path;
}

EmpiricalLaw time_changed_marginal(std::span<const ReducedPath> paths, const MomentTable& table,
                                   double t) {
  require_horizon(paths, table);
  const std::size_t k = time_change(table, t);
  std::map<std::uint64_t, std::uint64_t> counts;
  for (const auto& p : paths) ++counts[p.z[k]];
  return EmpiricalLaw::from_counts(std::move(counts));
}

FirstJumpSample first_jump_statistics(std::span<const ReducedPath> paths,
                                      const MomentTable& table) {
  require_horizon(paths, table);
  FirstJumpSample out;
  out.times.reserve(paths.size());
  for (const auto& p : paths) {
    const std::size_t g = p.mrca_generation();
    double t = g >= table.horizon ? 1.0 : table.rho_ratio(g + 1);
    if (t >= 1.0) {
      t = 1.0;
      ++out.censored;
    }
    out.times.push_back(t);
  }
  return out;
}

}  // namespace bpve
