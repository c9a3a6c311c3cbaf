#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "bpve/environment.hpp"

namespace bpve {

/// One genealogy class: the population path (Z_0..Z_n) together with the
/// reduced path (Z_{0,n}..Z_{n,n}).
struct EnumeratedOutcome {
  std::vector<std::uint32_t> population;
  std::vector<std::uint32_t> reduced;
  double probability = 0.0;

  bool survives() const { return population.back() > 0; }
  /// max{k : Z_{k,n} = 1}; empty on extinction.
  std::optional<std::size_t> mrca_generation() const;
};

/// Exact joint law of population and reduced paths, obtained by brute-force
/// convolution over family signatures. Makes no use of the survival curve,
/// so it can serve as an oracle for the exact engine and the samplers.
struct EnumerationResult {
  std::size_t horizon = 0;
  std::size_t cap = 0;
  /// Probability of the genealogies discarded because some generation
  /// exceeded the cap.
  double truncated_mass = 0.0;
  std::vector<EnumeratedOutcome> outcomes;

  double survival_probability() const;
  /// P(G_n >= k | Z_n > 0).
  double mrca_tail(std::size_t k) const;
  /// P(G_n = k | Z_n > 0) for k = 0..n.
  std::vector<double> mrca_law() const;
  /// Law of Z_{k,n} given Z_n > 0.
  std::map<std::uint32_t, double> reduced_law(std::size_t k) const;
  double conditional_mean() const;
};

inline constexpr std::size_t kMaxEnumerationHorizon = 8;
inline constexpr std::size_t kMaxEnumerationCap = 64;
inline constexpr std::size_t kDefaultEnumerationBudget = 2'000'000;

/// Requires finite-support (or binary) laws, n <= 8 and cap <= 64. Throws
/// BudgetExceeded when an intermediate law has more than `budget` states.
EnumerationResult enumerate_small(const Environment& env, std::size_t n, std::size_t cap,
                                  std::size_t budget = kDefaultEnumerationBudget);

}  // namespace bpve
