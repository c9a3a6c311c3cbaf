#pragma once

#include <cstddef>
#include <vector>

#include "bpve/environment.hpp"
#include "bpve/moments.hpp"

namespace bpve {

/// u_k = P(Z_n > 0 | Z_k = 1) = 1 - f_{k,n}(0) for k = 0..n.
///
/// `log_u` is authoritative; `u` is its exponential and underflows to zero
/// once u_k drops below the double range.
struct SurvivalCurve {
  std::size_t horizon = 0;
  std::vector<double> u;
  std::vector<double> log_u;

  double survival() const { return u.front(); }
};

/// Backward recursion in reciprocal space,
///   1/u_{k-1} = 1/(u_k f_k'(1)) + phi_k(1 - u_k),   u_n = 1,
/// carried out on log(1/u_k) so that no intermediate can overflow.
SurvivalCurve survival_curve(const Environment& env, std::size_t n);

/// Plain iteration u_{k-1} = 1 - f_k(1 - u_k) through the stable survival gap.
/// Independent of the shape function; used as a cross-check.
SurvivalCurve survival_curve_by_iteration(const Environment& env, std::size_t n);

/// Right-hand side of
///   P(Z_n > 0) = (1/mu_n + sum_k phi_k(f_{k,n}(0)) / mu_{k-1})^{-1}
/// evaluated with the curve's f_{k,n}(0) = 1 - u_k.
double survival_via_shape_identity(const Environment& env, const SurvivalCurve& curve,
                                   const MomentTable& table);
double survival_via_shape_identity(const Environment& env, std::size_t n);

/// Law of the MRCA generation G_n = max{k <= n : Z_{k,n} = 1} given Z_n > 0.
struct MrcaDistribution {
  std::size_t horizon = 0;
  std::vector<double> tail;       // P(G_n >= k | Z_n > 0)
  std::vector<double> log_tail;
  std::vector<double> cdf;        // P(G_n <= k | Z_n > 0) = 1 - tail[k+1]
  std::vector<double> reference;  // rho_k / rho_n
};

/// tail[k] = u_k prod_{i<=k} f_i'(1 - u_i) / u_0, accumulated in logs.
MrcaDistribution mrca_distribution(const Environment& env, const SurvivalCurve& curve,
                                   const MomentTable& table);
MrcaDistribution mrca_distribution(const Environment& env, std::size_t n);

struct ConditionalMean {
  double exact = 0.0;             // E[Z_n | Z_n > 0] = mu_n / u_0
  double kolmogorov_proxy = 0.0;  // mu_n rho_n / 2
};

ConditionalMean conditional_mean(const SurvivalCurve& curve, const MomentTable& table);
ConditionalMean conditional_mean(const Environment& env, std::size_t n);

}  // namespace bpve
