#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "bpve/random.hpp"
#include "bpve/stats.hpp"

using namespace bpve;
using doctest::Approx;

TEST_SUITE("stats") {

TEST_CASE("empirical law basics") {
  const auto c = EmpiricalLaw::continuous({3.0, 1.0, 2.0});
  CHECK(c.samples() == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.mean() == Approx(2.0));
  CHECK(c.quantile(0.5) == 2.0);
  const std::vector<std::uint64_t> xs{1, 1, 2, 5};
  const auto d = EmpiricalLaw::discrete(xs);
  CHECK(d.size() == 4);
  CHECK(d.frequency(1) == 0.5);
  CHECK(d.frequency(3) == 0.0);
  std::uint64_t total = 0;
  for (const auto& [_, n] : d.counts()) total += n;
  CHECK(total == d.size());
  CHECK_THROWS_AS(EmpiricalLaw::continuous({}).mean(), std::invalid_argument);
}

TEST_CASE("KS examples") {
  std::vector<double> q;
  for (int i = 1; i <= 99; ++i) q.push_back(i / 100.0);
  CHECK(ks_distance(EmpiricalLaw::continuous(q), ContinuousReference::uniform(0.0, 1.0)) == Approx(0.01));
  CHECK(ks_distance(EmpiricalLaw::continuous({0.0, 0.0}), ContinuousReference::exponential(1.0)) == Approx(1.0));
  CHECK_THROWS_AS(ks_distance(EmpiricalLaw::continuous({0.5}), ContinuousReference::exponential(1.0)), std::invalid_argument);
  CHECK_THROWS_AS(ContinuousReference::exponential(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ContinuousReference::uniform(1.0, 1.0), std::invalid_argument);
}

TEST_CASE("KS of exponential draws") {
  Rng rng = substream(51, 0);
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) xs.push_back(-std::log1p(-uniform01(rng)));
  CHECK(ks_distance(EmpiricalLaw::continuous(xs), ContinuousReference::exponential(1.0)) <= 0.006);
}

TEST_CASE("KS window") {
  // all mass at 0.95: outside the window [0, 0.9] the empirical CDF is 0
  const auto law = EmpiricalLaw::continuous({0.95, 0.95, 0.95});
  const auto u = ContinuousReference::uniform(0.0, 1.0);
  CHECK(ks_distance(law, u) == Approx(0.95));
  CHECK(ks_distance(law, u, std::pair{0.0, 0.9}) == Approx(0.9));
}

TEST_CASE("TV examples") {
  const std::vector<std::uint64_t> ones(10, 1);
  CHECK(tv_distance(EmpiricalLaw::discrete(ones), IntegerLaw::point_mass(1)) == 0.0);
  CHECK(tv_distance(EmpiricalLaw::discrete(ones), IntegerLaw::geometric(0.5)) == Approx(0.5));
  const std::vector<std::uint64_t> xs{1, 2, 2, 7};
  CHECK(tv_distance(EmpiricalLaw::discrete(xs), EmpiricalLaw::discrete(xs)) == 0.0);
}

TEST_CASE("TV of geometric draws") {
  Rng rng = substream(52, 0);
  std::vector<std::uint64_t> xs;
  for (int i = 0; i < 1000000; ++i) {
    std::uint64_t j = 1;
    while (uniform01(rng) >= 0.5) ++j;
    xs.push_back(j);
  }
  CHECK(tv_distance(EmpiricalLaw::discrete(xs), IntegerLaw::geometric(0.5)) <= 0.005);
}

TEST_CASE("property: distances bounded and symmetric") {
  std::mt19937_64 gen(53);
  std::uniform_int_distribution<std::uint64_t> small(1, 6);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::uint64_t> a, b;
    for (int i = 0; i < 30; ++i) {
      a.push_back(small(gen));
      b.push_back(small(gen));
    }
    const auto la = EmpiricalLaw::discrete(a);
    const auto lb = EmpiricalLaw::discrete(b);
    const double ab = tv_distance(la, lb);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab == Approx(tv_distance(lb, la)));
    CHECK(tv_distance(la, IntegerLaw::geometric(0.3)) <= 1.0);
  }
}

TEST_CASE("max cdf gap") {
  const std::vector<double> a{0, 0.5, 1};
  const std::vector<double> b{0, 0.6, 1};
  const std::vector<double> c{0, 0.2, 1};
  CHECK(max_cdf_gap(a, a) == 0.0);
  CHECK(max_cdf_gap(a, b) == Approx(0.1));
  CHECK(max_cdf_gap(b, c) <= max_cdf_gap(b, a) + max_cdf_gap(a, c));
  CHECK_THROWS_AS(max_cdf_gap(a, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST_CASE("geometric reference law") {
  const auto g = IntegerLaw::geometric(0.25);
  CHECK(g.pmf(0) == 0.0);
  CHECK(g.pmf(1) == Approx(0.25));
  CHECK(g.pmf(3) == Approx(0.25 * 0.75 * 0.75));
  CHECK(g.upper_tail(2) == Approx(0.75 * 0.75));
  CHECK_THROWS_AS(IntegerLaw::geometric(0.0), std::invalid_argument);
}

TEST_CASE("chi-square statistic by hand") {
  // 4 samples, reference uniform over {1, 2}: expected 2 and 2
  const std::vector<std::uint64_t> xs{1, 1, 1, 2};
  const auto ref = IntegerLaw::table({{1, 0.5}, {2, 0.5}});
  CHECK(chi_square_statistic(EmpiricalLaw::discrete(xs), ref, 1, 2) == Approx(1.0));
}

}  // TEST_SUITE
