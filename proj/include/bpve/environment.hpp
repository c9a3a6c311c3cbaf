#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bpve/offspring_law.hpp"

namespace bpve {

enum class Schedule {
  constant,             // f_n = law for all n
  poisson_linear_mean,  // lambda_1 = 1, lambda_k = k/(k-1): mu_n = n
  poisson_exp_sqrt,     // lambda_n = exp(-(sqrt n - sqrt(n-1))): mu_n = exp(-sqrt n)
  poisson_explicit,     // lambda_n read from a list
  explicit_list,        // arbitrary list of laws
};

std::string to_string(Schedule schedule);
/// Accepts the config spellings ("constant", "poisson-linear-mean", ...).
Schedule parse_schedule(const std::string& name);

struct EnvironmentDescriptor {
  Schedule schedule = Schedule::constant;
  std::optional<OffspringLaw> law;  // constant
  std::vector<double> lambdas;      // poisson_explicit
  std::vector<OffspringLaw> laws;   // explicit_list
  /// Largest generation that will be requested. List schedules default to
  /// the list length when this is 0.
  std::size_t horizon = 0;
};

/// A varying environment (f_1, f_2, ...) truncated at a horizon.
///
/// Generated schedules are materialized on first access and then shared by
/// all copies; concurrent first access is safe.
class Environment {
 public:
  static Environment build(EnvironmentDescriptor descriptor);
  static Environment constant(OffspringLaw law, std::size_t horizon);
  static Environment from_laws(std::vector<OffspringLaw> laws);

  /// Law of generation n, 1 <= n <= horizon().
  const OffspringLaw& law_at(std::size_t n) const;
  std::size_t horizon() const noexcept { return descriptor_->horizon; }
  const EnvironmentDescriptor& descriptor() const noexcept { return *descriptor_; }
  Schedule schedule() const noexcept { return descriptor_->schedule; }
  /// Same environment with a different horizon (list schedules may only
  /// shrink).
  Environment with_horizon(std::size_t horizon) const;

  /// Canonical one-line JSON rendering of the descriptor.
  std::string describe() const;

 private:
  struct Cache;
  Environment(std::shared_ptr<const EnvironmentDescriptor> d, std::shared_ptr<Cache> c);

  std::shared_ptr<const EnvironmentDescriptor> descriptor_;
  std::shared_ptr<Cache> cache_;
};

/// Poisson rate of generation n under the generated schedules.
double poisson_linear_mean_rate(std::size_t n);
double poisson_exp_sqrt_rate(std::size_t n);

}  // namespace bpve
