#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bpve/environment.hpp"

namespace bpve {

/// Per-generation moment sequences of an environment up to a horizon n.
///
/// mu_k = f_1'(1) ... f_k'(1) is kept only as its logarithm. rho_k is kept
/// both directly and as log rho_k; the direct value becomes +inf when it
/// leaves the double range (e.g. constant subcritical laws at n = 1024),
/// and every consumer falls back to the log column in that case.
struct MomentTable {
  std::size_t horizon = 0;
  std::vector<double> mean;     // [1..n] f_k'(1); mean[0] = 1
  std::vector<double> nu;       // [1..n]; nu[0] = 0
  std::vector<double> log_mu;   // [0..n]
  std::vector<double> rho;      // [0..n]
  std::vector<double> log_rho;  // [0..n]; -inf where rho = 0

  double mu(std::size_t k) const;
  bool rho_finite() const noexcept;
  /// rho_k / rho_n computed in log space.
  double rho_ratio(std::size_t k) const;
};

MomentTable moment_table(const Environment& env, std::size_t n);

enum class Verdict { looks_critical, looks_subcritical, looks_supercritical_or_degenerate, inconclusive };

std::string to_string(Verdict verdict);

struct Checkpoint {
  std::size_t generation;
  double log_rho;
  double log_mu_rho;
};

struct StarDiagnostic {
  double epsilon;
  /// max over k <= n of the smallest admissible c_eps for f_k.
  double max_constant;
  std::size_t argmax_generation;
};

struct CriticalityReport {
  std::size_t horizon = 0;
  double rho_n = 0.0;
  double log_rho_n = 0.0;
  double mu_rho_n = 0.0;
  double log_mu_rho_n = 0.0;
  std::vector<Checkpoint> checkpoints;  // n, n/2, n/4, ... down to 1
  double rho_growth = 1.0;              // rho_n / rho_{n/2}
  double mu_rho_growth = 1.0;           // (mu rho)_n / (mu rho)_{n/2}
  Verdict verdict = Verdict::inconclusive;
  std::array<StarDiagnostic, 3> star{};
};

/// Finite-horizon heuristics standing in for rho_n -> inf and mu_n rho_n -> inf.
inline constexpr double kCriticalGrowth = 1.2;
inline constexpr double kCriticalMinRho = 10.0;
inline constexpr double kStallGrowth = 1.05;
inline constexpr std::size_t kMinClassifyHorizon = 16;
inline constexpr std::array<double, 3> kStarEpsilons = {0.5, 0.1, 0.01};

CriticalityReport classify(const MomentTable& table, const Environment& env);

/// Verdict from the growth figures alone.
Verdict verdict_from(double rho_growth, double mu_rho_growth, double rho_n);

/// Smallest c with E[Y^2; Y > c(1 + E Y)] <= eps E[Y^2; Y >= 2].
double star_constant(const OffspringLaw& law, double epsilon);

/// k_n(t) = max{k >= 0 : rho_k <= t rho_n} for t in [0, 1).
std::size_t time_change(const MomentTable& table, double t);

}  // namespace bpve
