#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bpve/environment.hpp"
#include "bpve/exact_engine.hpp"
#include "bpve/moments.hpp"
#include "bpve/offspring_law.hpp"
#include "bpve/random.hpp"
#include "bpve/stats.hpp"

namespace bpve {

/// One realization of the reduced process (Z_{k,n})_{0<=k<=n} given Z_n > 0.
struct ReducedPath {
  std::vector<std::uint64_t> z;

  std::size_t horizon() const noexcept { return z.size() - 1; }
  /// G_n = max{k : z[k] = 1}.
  std::size_t mrca_generation() const;
  /// z[0] = 1, nondecreasing, z[n] >= 1.
  bool well_formed() const;
};

/// Throws InvariantViolation unless the path is well formed.
void check_path_shape(const ReducedPath& path);

struct JumpTime {
  double time;         // rho_k / rho_n for a jump at generation k
  std::uint64_t level; // z[k] after the jump
};

/// Jumps of t -> z[k_n(t)] on [0, 1); a jump at generation k happens at
/// rescaled time rho_k / rho_n.
std::vector<JumpTime> jump_times(const ReducedPath& path, const MomentTable& table);

inline constexpr std::uint64_t kDefaultProgenyCap = 1'000'000;

/// Exact sampler for the reduced forest given survival.
///
/// Every reduced individual of generation k < n draws its number of reduced
/// children from thin_and_condition(f_{k+1}, u_{k+1}); the per-generation
/// tables are built once, so sampling never rejects. Throws NumericError
/// once the reduced individuals of one path exceed `progeny_cap`
/// (supercritical environments).
class ReducedForestSampler {
 public:
  ReducedForestSampler(const Environment& env, const SurvivalCurve& curve,
                       std::uint64_t progeny_cap = kDefaultProgenyCap);

  std::size_t horizon() const noexcept { return steps_.size(); }
  ReducedPath sample(Rng& rng) const;

 private:
  std::vector<ThinnedConditionedLaw> steps_;  // steps_[k] drives generation k -> k+1
  std::uint64_t cap_;
};

ReducedPath sample_reduced_path(const Environment& env, const SurvivalCurve& curve, Rng& rng);

struct RejectionResult {
  std::optional<ReducedPath> path;  // empty when all attempts died out
  std::uint64_t attempts = 0;
};

/// Forward simulation of Z with rejection of extinct runs; survivors are
/// back-marked to recover the reduced path. Throws NumericError if a single
/// attempt exceeds `progeny_cap` individuals in total.
RejectionResult sample_rejection(const Environment& env, std::size_t n, Rng& rng,
                                 std::uint64_t max_attempts,
                                 std::uint64_t progeny_cap = kDefaultProgenyCap);

/// Standard Yule process on [0, u_max]: the holding time in state j is
/// exponential with rate j.
struct YulePath {
  double horizon = 0.0;
  std::vector<double> jumps;  // strictly increasing, all <= horizon

  std::uint64_t value(double u) const;
};

YulePath sample_yule(double u_max, Rng& rng);

/// Law of z[k_n(t)] across paths; its limit is geometric with success 1 - t.
EmpiricalLaw time_changed_marginal(std::span<const ReducedPath> paths, const MomentTable& table,
                                   double t);

struct FirstJumpSample {
  std::vector<double> times;  // T_{1,n}; 1.0 when no branching before the horizon
  std::size_t censored = 0;
};

/// T_{1,n} = inf{t : z[k_n(t)] >= 2} = rho_{G_n + 1} / rho_n.
FirstJumpSample first_jump_statistics(std::span<const ReducedPath> paths,
                                      const MomentTable& table);

}  // namespace bpve
