#include <doctest.h>

#include <cmath>
#include <random>

#include "bpve/enumeration.hpp"
#include "bpve/exact_engine.hpp"
#include "helpers.hpp"

using namespace bpve;
using doctest::Approx;

namespace {

Environment critical_binary(std::size_t n) { return Environment::constant(OffspringLaw::binary(1.0), n); }

Environment named(Schedule s, std::size_t n) {
  EnvironmentDescriptor d;
  d.schedule = s;
  d.horizon = n;
  return Environment::build(d);
}

}  // namespace

TEST_SUITE("exact_engine") {

TEST_CASE("survival curve by hand") {
  // g(x) = x - x^2/2 iterated from 1
  const auto c2 = survival_curve(critical_binary(2), 2);
  CHECK(c2.u[2] == 1.0);
  CHECK(c2.u[1] == Approx(0.5).epsilon(1e-15));
  CHECK(c2.u[0] == Approx(0.375).epsilon(1e-15));
  CHECK(survival_curve(critical_binary(3), 3).u[0] == Approx(0.3046875).epsilon(1e-15));
  const auto c1 = survival_curve(Environment::constant(OffspringLaw::poisson(0.3), 1), 1);
  CHECK(c1.u[1] == 1.0);
  CHECK(c1.u[0] == Approx(-std::expm1(-0.3)).epsilon(1e-15));
}

TEST_CASE("survival curve errors") {
  CHECK_THROWS_AS(survival_curve(critical_binary(3), 0), std::invalid_argument);
  CHECK_THROWS_AS(survival_curve(critical_binary(3), 4), std::out_of_range);
}

TEST_CASE("shape identity by hand") {
  CHECK(survival_via_shape_identity(critical_binary(2), 2) == Approx(0.375).epsilon(1e-15));
  CHECK(survival_via_shape_identity(critical_binary(1), 1) == Approx(0.5).epsilon(1e-15));
}

TEST_CASE("property: shape identity on random finite environments") {
  std::mt19937_64 gen(31);
  std::uniform_int_distribution<std::size_t> horizon(1, 30);
  for (int trial = 0; trial < 250; ++trial) {
    const std::size_t n = horizon(gen);
    const auto env = testing::random_finite_environment(gen, n, 6);
    const auto curve = survival_curve(env, n);
    const auto table = moment_table(env, n);
    CHECK(testing::rel_err(survival_via_shape_identity(env, curve, table), curve.survival()) <= 1e-9);
  }
}

TEST_CASE("property: recursion agrees with plain iteration") {
  std::mt19937_64 gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto env = testing::random_finite_environment(gen, 25, 6);
    const auto curve = survival_curve(env, 25);
    const auto naive = testing::naive_curve(env, 25);
    const auto iterated = survival_curve_by_iteration(env, 25);
    for (std::size_t k = 0; k <= 25; ++k) {
      CHECK(curve.u[k] > 0.0);
      CHECK(curve.u[k] <= 1.0);
      CHECK(testing::rel_err(curve.u[k], iterated.u[k]) <= 1e-12);
      if (naive[k] > 1e-6) CHECK(testing::rel_err(curve.u[k], naive[k]) <= 1e-9);
    }
    CHECK(curve.u[25] == 1.0);
  }
}

TEST_CASE("stability on the exp-sqrt schedule at n = 1e4") {
  const std::size_t n = 10000;
  const auto env = named(Schedule::poisson_exp_sqrt, n);
  const auto curve = survival_curve(env, n);
  CHECK(std::isfinite(curve.log_u[0]));
  CHECK(curve.u[0] > 0.0);
  CHECK(curve.log_u[0] < -90.0);
  CHECK(testing::rel_err(survival_via_shape_identity(env, curve, moment_table(env, n)), curve.u[0]) <= 1e-9);
  const auto iterated = survival_curve_by_iteration(env, n);
  CHECK(testing::rel_err(curve.u[0], iterated.u[0]) <= 1e-9);
}

TEST_CASE("Kolmogorov ratio for the critical binary law") {
  auto ratio = [](std::size_t n) {
    return survival_curve(critical_binary(n), n).survival() * static_cast<double>(n) / 2.0;
  };
  const double r2 = ratio(100);
  const double r4 = ratio(10000);
  CHECK(std::abs(r4 - 1.0) <= 0.02);
  CHECK(std::abs(r4 - 1.0) < std::abs(r2 - 1.0));
}

TEST_CASE("mrca distribution by hand") {
  const auto d = mrca_distribution(critical_binary(2), 2);
  CHECK(d.tail[0] == 1.0);
  CHECK(d.tail[1] == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(d.cdf[0] == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(d.cdf[1] == Approx(1.0).epsilon(1e-14));
  CHECK(d.cdf[2] == 1.0);
  CHECK(d.reference[1] == Approx(0.5));
  // binary offspring: Z_2 is even, so G_2 = 2 is impossible
  CHECK(d.tail[2] == 0.0);
}

TEST_CASE("property: mrca tail monotone, in [0,1], cdf ends at 1") {
  std::mt19937_64 gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    const auto env = testing::random_finite_environment(gen, 30, 6);
    const auto d = mrca_distribution(env, 30);
    CHECK(d.tail[0] == 1.0);
    CHECK(d.cdf[30] == 1.0);
    for (std::size_t k = 1; k <= 30; ++k) {
      CHECK(d.tail[k] <= d.tail[k - 1]);
      CHECK(d.tail[k] >= 0.0);
    }
  }
  for (auto s : {Schedule::poisson_linear_mean, Schedule::poisson_exp_sqrt}) {
    const auto d = mrca_distribution(named(s, 3000), 3000);
    for (std::size_t k = 1; k <= 3000; ++k) CHECK(d.tail[k] <= d.tail[k - 1]);
  }
}

TEST_CASE("conditional mean") {
  CHECK(conditional_mean(critical_binary(2), 2).exact == Approx(8.0 / 3.0).epsilon(1e-14));
  CHECK(conditional_mean(critical_binary(3), 3).exact == Approx(3.2820513).epsilon(1e-7));
  CHECK(conditional_mean(Environment::constant(OffspringLaw::finite({0.0, 1.0}), 1), 1).exact == Approx(1.0));
  CHECK(conditional_mean(critical_binary(2), 2).kolmogorov_proxy == Approx(1.0));
}

TEST_CASE("degenerate single line of descent") {
  const auto env = Environment::constant(OffspringLaw::finite({0.0, 1.0}), 12);
  const auto curve = survival_curve(env, 12);
  for (double u : curve.u) CHECK(u == Approx(1.0));
  const auto d = mrca_distribution(env, curve, moment_table(env, 12));
  for (std::size_t k = 0; k <= 12; ++k) CHECK(d.tail[k] == Approx(1.0));
}

TEST_CASE("property: engine agrees with enumeration where the cap never binds") {
  std::mt19937_64 gen(34);
  std::uniform_int_distribution<std::size_t> horizon(1, 4);
  int compared = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = horizon(gen);
    // support {0,1,2}: at most 2^4 individuals, the cap never binds
    const auto env = testing::random_finite_environment(gen, n, 3);
    const auto e = enumerate_small(env, n, 64);
    if (e.truncated_mass != 0.0) continue;
    ++compared;
    const auto curve = survival_curve(env, n);
    const auto table = moment_table(env, n);
    const auto d = mrca_distribution(env, curve, table);
    CHECK(testing::rel_err(curve.survival(), e.survival_probability()) <= 1e-10);
    for (std::size_t k = 0; k <= n; ++k) CHECK(std::abs(d.tail[k] - e.mrca_tail(k)) <= 1e-10);
    CHECK(testing::rel_err(conditional_mean(curve, table).exact, e.conditional_mean()) <= 1e-10);
    // mu_n against the enumerated E[Z_n]
    double mean = 0.0;
    for (const auto& o : e.outcomes) mean += o.probability * o.population.back();
    CHECK(testing::rel_err(std::exp(table.log_mu[n]), mean) <= 1e-10);
  }
  CHECK(compared == 60);
}

TEST_CASE("critical binary against enumeration up to n = 6") {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto env = critical_binary(n);
    const auto e = enumerate_small(env, n, 64);
    CHECK(e.truncated_mass == 0.0);
    const auto d = mrca_distribution(env, n);
    CHECK(testing::rel_err(survival_curve(env, n).survival(), e.survival_probability()) <= 1e-10);
    for (std::size_t k = 0; k <= n; ++k) CHECK(std::abs(d.tail[k] - e.mrca_tail(k)) <= 1e-10);
  }
}

}  // TEST_SUITE
