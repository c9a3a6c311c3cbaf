#include "bpve/environment.hpp"

#include <cmath>
#include <cstdio>
#include <mutex>
#include <stdexcept>

namespace bpve {

struct Environment::Cache {
  std::once_flag filled;
  std::vector<OffspringLaw> laws;
};

std::string to_string(Schedule schedule) {
  switch (schedule) {
    case Schedule::constant: return "constant";
    case Schedule::poisson_linear_mean: return "poisson-linear-mean";
    case Schedule::poisson_exp_sqrt: return "poisson-exp-sqrt";
    case Schedule::poisson_explicit: return "poisson-explicit";
    case Schedule::explicit_list: return "explicit";
  }
  return "unknown";
}

Schedule parse_schedule(const std::string& name) {
  for (auto s : {Schedule::constant, Schedule::poisson_linear_mean, Schedule::poisson_exp_sqrt,
                 Schedule::poisson_explicit, Schedule::explicit_list}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown schedule '" + name + "'");
}

double poisson_linear_mean_rate(std::size_t n) {
  if (n == 0) throw std::out_of_range("generation index starts at 1");
  if (n == 1) return 1.0;
  return static_cast<double>(n) / static_cast<double>(n - 1);
}

double poisson_exp_sqrt_rate(std::size_t n) {
  if (n == 0) throw std::out_of_range("generation index starts at 1");
  const double a = std::sqrt(static_cast<double>(n));
  const double b = std::sqrt(static_cast<double>(n - 1));
  // sqrt(n) - sqrt(n-1) without cancellation
  return std::exp(-1.0 / (a + b));
}

Environment::Environment(std::shared_ptr<const EnvironmentDescriptor> d,
                         std::shared_ptr<Cache> c)
    : descriptor_(std::move(d)), cache_(std::move(c)) {}

Environment Environment::build(EnvironmentDescriptor d) {
  switch (d.schedule) {
    case Schedule::constant:
      if (!d.law) throw std::invalid_argument("constant schedule requires 'law'");
      if (d.horizon == 0) throw std::invalid_argument("constant schedule requires a horizon");
      break;
    case Schedule::poisson_linear_mean:
    case Schedule::poisson_exp_sqrt:
      if (d.horizon == 0) {
        throw std::invalid_argument(to_string(d.schedule) + " schedule requires a horizon");
      }
      break;
    case Schedule::poisson_explicit:
      if (d.lambdas.empty()) throw std::invalid_argument("poisson-explicit requires 'lambdas'");
      for (double l : d.lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) {
          throw std::invalid_argument("poisson-explicit: 'lambdas' entries must be positive");
        }
      }
      if (d.horizon == 0) d.horizon = d.lambdas.size();
      if (d.horizon > d.lambdas.size()) {
        throw std::invalid_argument("poisson-explicit: horizon exceeds 'lambdas' length");
      }
      break;
    case Schedule::explicit_list:
      if (d.laws.empty()) throw std::invalid_argument("explicit schedule requires 'laws'");
      if (d.horizon == 0) d.horizon = d.laws.size();
      if (d.horizon > d.laws.size()) {
        throw std::invalid_argument("explicit: horizon exceeds 'laws' length");
      }
      break;
  }
  return Environment(std::make_shared<const EnvironmentDescriptor>(std::move(d)),
                     std::make_shared<Cache>());
}

Environment Environment::constant(OffspringLaw law, std::size_t horizon) {
  EnvironmentDescriptor d;
  d.schedule = Schedule::constant;
  d.law = std::move(law);
  d.horizon = horizon;
  return build(std::move(d));
}

Environment Environment::from_laws(std::vector<OffspringLaw> laws) {
  EnvironmentDescriptor d;
  d.schedule = Schedule::explicit_list;
  d.laws = std::move(laws);
  return build(std::move(d));
}

Environment Environment::with_horizon(std::size_t horizon) const {
  EnvironmentDescriptor d = *descriptor_;
  d.horizon = horizon;
  return build(std::move(d));
}

const OffspringLaw& Environment::law_at(std::size_t n) const {
  const auto& d = *descriptor_;
  if (n < 1 || n > d.horizon) {
    throw std::out_of_range("law_at: generation " + std::to_string(n) + " outside [1, " +
                            std::to_string(d.horizon) + "]");
  }
  switch (d.schedule) {
    case Schedule::constant: return *d.law;
    case Schedule::explicit_list: return d.laws[n - 1];
    default: break;
  }
  std::call_once(cache_->filled, [&] {
    cache_->laws.reserve(d.horizon);
    for (std::size_t k = 1; k <= d.horizon; ++k) {
      double rate = 0.0;
      switch (d.schedule) {
        case Schedule::poisson_linear_mean: rate = poisson_linear_mean_rate(k); break;
        case Schedule::poisson_exp_sqrt: rate = poisson_exp_sqrt_rate(k); break;
        default: rate = d.lambdas[k - 1]; break;
      }
      cache_->laws.push_back(OffspringLaw::poisson(rate));
    }
  });
  return cache_->laws[n - 1];
}

std::string Environment::describe() const {
  const auto& d = *descriptor_;
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::string out = R"({"schedule":")" + to_string(d.schedule) + "\"";
  switch (d.schedule) {
    case Schedule::constant: out += ",\"law\":" + d.law->describe(); break;
    case Schedule::poisson_explicit:
      out += ",\"lambdas\":[";
      for (std::size_t i = 0; i < d.lambdas.size(); ++i) out += (i ? "," : "") + num(d.lambdas[i]);
      out += "]";
      break;
    case Schedule::explicit_list:
      out += ",\"laws\":[";
      for (std::size_t i = 0; i < d.laws.size(); ++i) out += (i ? "," : "") + d.laws[i].describe();
      out += "]";
      break;
    default: break;
  }
  return out + ",\"horizon\":" + std::to_string(d.horizon) + "}";
}

}  // namespace bpve
