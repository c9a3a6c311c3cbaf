#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bpve/environment.hpp"
#include "bpve/offspring_law.hpp"

namespace testing {

// Random weights on {0..K}, K <= max_support - 1, with p_0 < 1.
inline std::vector<double> random_weights(std::mt19937_64& gen, std::size_t max_support) {
  std::uniform_int_distribution<std::size_t> size(2, max_support);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(size(gen));
  double total = 0.0;
  for (auto& x : w) total += (x = u(gen) + 0.02);
  for (auto& x : w) x /= total;
  // exact renormalization of the last entry
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) head += w[i];
  w.back() = 1.0 - head;
  return w;
}

inline bpve::Environment random_finite_environment(std::mt19937_64& gen, std::size_t n,
                                                   std::size_t max_support) {
  std::vector<bpve::OffspringLaw> laws;
  for (std::size_t k = 0; k < n; ++k) laws.push_back(bpve::OffspringLaw::finite(random_weights(gen, max_support)));
  return bpve::Environment::from_laws(std::move(laws));
}

// Plain power series, no stabilization: the oracle for finite tables.
inline double direct_pgf(const std::vector<double>& w, double s) {
  double acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * std::pow(s, static_cast<double>(k));
  return acc;
}

inline double direct_pgf(const bpve::OffspringLaw& law, double s) {
  if (law.kind() == bpve::LawKind::poisson) return std::exp(law.lambda() * (s - 1.0));
  std::vector<double> w(law.weights().begin(), law.weights().end());
  return direct_pgf(w, s);
}

// u_{k-1} = 1 - f_k(1 - u_k) with the plain pgf; fine while u stays >> 1e-16.
inline std::vector<double> naive_curve(const bpve::Environment& env, std::size_t n) {
  std::vector<double> u(n + 1, 1.0);
  for (std::size_t k = n; k >= 1; --k) u[k - 1] = 1.0 - direct_pgf(env.law_at(k), 1.0 - u[k]);
  return u;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace testing
