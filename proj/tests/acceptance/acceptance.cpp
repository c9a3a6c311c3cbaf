// Acceptance suite: one PASS/FAIL line per criterion.
//   bpve_acceptance               run all
//   bpve_acceptance --criterion N run one

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bpve/app/parallel.hpp"
#include "bpve/enumeration.hpp"
#include "bpve/exact_engine.hpp"
#include "bpve/genealogy_sim.hpp"
#include "bpve/moments.hpp"
#include "bpve/stats.hpp"

using namespace bpve;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    detail << (ok ? "" : "[!] ") << what << "; ";
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

Environment critical_binary(std::size_t n) { return Environment::constant(OffspringLaw::binary(1.0), n); }

Environment named(Schedule s, std::size_t n) {
  EnvironmentDescriptor d;
  d.schedule = s;
  d.horizon = n;
  return Environment::build(d);
}

IntegerLaw law_of(const std::vector<double>& masses) {
  std::map<std::uint64_t, double> m;
  for (std::size_t k = 0; k < masses.size(); ++k) m[k] = masses[k];
  return IntegerLaw::table(m);
}

std::vector<double> mrca_masses(const MrcaDistribution& d) {
  std::vector<double> p(d.horizon + 1);
  for (std::size_t k = 0; k <= d.horizon; ++k) p[k] = d.tail[k] - (k < d.horizon ? d.tail[k + 1] : 0.0);
  return p;
}

// Shape violations seen by any criterion in this process.
std::size_t g_violations = 0;

void audit(const ReducedPath& p) { g_violations += !p.well_formed(); }

void audit(const MomentTable& t, const SurvivalCurve& c, const MrcaDistribution& d) {
  for (std::size_t k = 1; k <= t.horizon; ++k) {
    g_violations += t.log_rho[k] < t.log_rho[k - 1];
    g_violations += d.tail[k] > d.tail[k - 1];
  }
  g_violations += c.u[c.horizon] != 1.0;
  g_violations += d.tail[0] != 1.0;
}

void c1(Outcome& o) {
  const auto env = critical_binary(2);
  const auto curve = survival_curve(env, 2);
  const auto table = moment_table(env, 2);
  const auto d = mrca_distribution(env, curve, table);
  audit(table, curve, d);
  const auto e = enumerate_small(env, 2, 8);
  const double p = curve.survival();
  const double g1 = d.tail[1];
  const double split = 1.0 - d.tail[1];  // Z_{1,2} = 2 iff G_2 = 0
  const double b = conditional_mean(curve, table).exact;
  o.require(std::abs(p - 0.375) <= 1e-12, "P(Z_2>0)=" + fmt(p));
  o.require(std::abs(g1 - 2.0 / 3.0) <= 1e-12, "P(G_2>=1)=" + fmt(g1));
  o.require(std::abs(split - 1.0 / 3.0) <= 1e-12, "P(Z_{1,2}=2)=" + fmt(split));
  o.require(std::abs(b - 8.0 / 3.0) <= 1e-12, "b_2=" + fmt(b));
  const double diff = std::max({std::abs(p - e.survival_probability()), std::abs(g1 - e.mrca_tail(1)),
                                std::abs(split - e.reduced_law(1).at(2)), std::abs(b - e.conditional_mean())});
  o.require(diff <= 1e-10 && e.truncated_mass == 0.0, "engine vs enumeration " + fmt(diff) + " (tol 1e-10)");
}

void c2(Outcome& o) {
  std::mt19937_64 gen(20240602);
  std::uniform_int_distribution<std::size_t> horizon(1, 30);
  std::uniform_int_distribution<std::size_t> support(2, 6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  constexpr int kEnvironments = 250;
  for (int trial = 0; trial < kEnvironments; ++trial) {
    const std::size_t n = horizon(gen);
    std::vector<OffspringLaw> laws;
    for (std::size_t k = 0; k < n; ++k) {
      std::vector<double> w(support(gen));
      double total = 0.0;
      for (auto& x : w) total += (x = u(gen) + 0.01);
      for (auto& x : w) x /= total;
      laws.push_back(OffspringLaw::finite(w));
    }
    const auto env = Environment::from_laws(std::move(laws));
    const auto curve = survival_curve(env, n);
    const auto table = moment_table(env, n);
    const double rel = std::abs(survival_via_shape_identity(env, curve, table) - curve.survival()) / curve.survival();
    worst = std::max(worst, rel);
    audit(table, curve, mrca_distribution(env, curve, table));
  }
  o.require(worst <= 1e-9, std::to_string(kEnvironments) + " environments, max relative error " + fmt(worst) + " (tol 1e-9)");
}

double kolmogorov_ratio(std::size_t n) {
  const auto env = critical_binary(n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  audit(table, curve, mrca_distribution(env, curve, table));
  return table.rho[n] * curve.survival() / 2.0;
}

void c3(Outcome& o) {
  const double r2 = kolmogorov_ratio(100);
  const double r4 = kolmogorov_ratio(10000);
  o.require(std::abs(r4 - 1.0) <= 0.02, "ratio at n=1e4 " + fmt(r4) + " (tol 0.02)");
  o.require(std::abs(r4 - 1.0) < std::abs(r2 - 1.0), "closer than at n=100 (" + fmt(r2) + ")");
}

double mrca_gap(const Environment& env, std::size_t n) {
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  const auto d = mrca_distribution(env, curve, table);
  audit(table, curve, d);
  return max_cdf_gap(d.cdf, d.reference);
}

void c4(Outcome& o) {
  const std::vector<std::size_t> ns{128, 512, 2048};
  for (int which = 0; which < 2; ++which) {
    const auto env = which == 0 ? critical_binary(2048) : named(Schedule::poisson_linear_mean, 2048);
    std::vector<double> gaps;
    for (std::size_t n : ns) gaps.push_back(mrca_gap(env, n));
    const std::string label = which == 0 ? "binary" : "linear-mean";
    o.require(gaps[1] < gaps[0] && gaps[2] < gaps[1],
              label + " gaps " + fmt(gaps[0]) + " > " + fmt(gaps[1]) + " > " + fmt(gaps[2]));
    if (which == 0) o.require(gaps[2] < 0.1, "binary gap at 2048 below 0.1");
  }
}

void c5(Outcome& o) {
  const std::size_t n = 100000;
  const auto env = named(Schedule::poisson_linear_mean, n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  const auto d = mrca_distribution(env, curve, table);
  audit(table, curve, d);
  for (double t : {0.3, 0.5, 0.7}) {
    const auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), t)));
    const double p = d.cdf[k];
    o.require(std::abs(p - t) <= 0.06, "t=" + fmt(t) + " P(G<=" + std::to_string(k) + ")=" + fmt(p) +
                                           " |gap| " + fmt(std::abs(p - t)) + " (tol 0.06)");
  }
}

void c6(Outcome& o) {
  const std::size_t n = 10000;
  const auto env = named(Schedule::poisson_exp_sqrt, n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  const auto d = mrca_distribution(env, curve, table);
  audit(table, curve, d);
  o.require(std::isfinite(curve.log_u[0]) && curve.u[0] > 0.0, "log P(Z_n>0)=" + fmt(curve.log_u[0]));
  const double w = 2.0 * std::sqrt(static_cast<double>(n));
  for (double t : {0.5, 1.0}) {
    const std::size_t k = n - static_cast<std::size_t>(std::floor(t * w));
    // (n - G_n)/(2 sqrt n) <= t  <=>  G_n >= k
    const double scaled = d.tail[k];
    const double below = d.cdf[k];
    o.require(std::abs(scaled - (-std::expm1(-t))) <= 0.05,
              "t=" + fmt(t) + " P((n-G)/(2sqrt n)<=t)=" + fmt(scaled) + " vs 1-e^-t " + fmt(-std::expm1(-t)));
    o.require(std::abs(below - std::exp(-t)) <= 0.05,
              "P(G<=" + std::to_string(k) + ")=" + fmt(below) + " vs e^-t " + fmt(std::exp(-t)));
  }
}

void c7(Outcome& o) {
  const std::size_t n = 500;
  const auto env = critical_binary(n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  audit(table, curve, mrca_distribution(env, curve, table));
  const double b = conditional_mean(curve, table).exact;
  const ReducedForestSampler sampler(env, curve);
  auto values = app::replicate(7007, 20000, workers(), [&](std::size_t, Rng& rng) {
    const auto p = sampler.sample(rng);
    return std::pair{p.well_formed(), static_cast<double>(p.z[n]) / b};
  });
  std::vector<double> xs;
  for (const auto& [ok, x] : values) {
    g_violations += !ok;
    xs.push_back(x);
  }
  const double ks = ks_distance(EmpiricalLaw::continuous(xs), ContinuousReference::exponential(1.0));
  o.require(ks <= 0.03, "KS(Z_n/b_n, Exp(1))=" + fmt(ks) + " (tol 0.03, 2e4 samples)");
}

void c8(Outcome& o) {
  const std::size_t n = 1000;
  const auto env = critical_binary(n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  audit(table, curve, mrca_distribution(env, curve, table));
  const ReducedForestSampler sampler(env, curve);
  auto paths = app::replicate(8008, 20000, workers(), [&](std::size_t, Rng& rng) { return sampler.sample(rng); });
  for (const auto& p : paths) audit(p);
  for (double t : {0.25, 0.5, 0.75}) {
    const double tv = tv_distance(time_changed_marginal(paths, table, t), IntegerLaw::geometric(1.0 - t));
    o.require(tv <= 0.05, "t=" + fmt(t) + " TV=" + fmt(tv) + " (tol 0.05)");
  }
  const auto first = first_jump_statistics(paths, table);
  const double ks = ks_distance(EmpiricalLaw::continuous(first.times), ContinuousReference::uniform(0.0, 1.0),
                                std::pair{0.0, 0.9});
  o.require(ks <= 0.04, "first jump KS on [0,0.9]=" + fmt(ks) + " (tol 0.04)");
}

void c9(Outcome& o) {
  const std::size_t n = 30;
  const auto env = critical_binary(n);
  const auto curve = survival_curve(env, n);
  const auto table = moment_table(env, n);
  const auto d = mrca_distribution(env, curve, table);
  audit(table, curve, d);
  const IntegerLaw exact = law_of(mrca_masses(d));
  const ReducedForestSampler sampler(env, curve);
  constexpr std::size_t kSamples = 50000;
  auto conditioned = app::replicate(9009, kSamples, workers(), [&](std::size_t, Rng& rng) {
    const auto p = sampler.sample(rng);
    return std::pair{p.well_formed(), static_cast<std::uint64_t>(p.mrca_generation())};
  });
  auto rejected = app::replicate(9010, kSamples, workers(), [&](std::size_t, Rng& rng) {
    const auto r = sample_rejection(env, n, rng, 1'000'000);
    if (!r.path) return std::pair{false, std::uint64_t{0}};
    return std::pair{r.path->well_formed(), static_cast<std::uint64_t>(r.path->mrca_generation())};
  });
  std::vector<std::uint64_t> a, b;
  for (const auto& [ok, g] : conditioned) {
    g_violations += !ok;
    a.push_back(g);
  }
  for (const auto& [ok, g] : rejected) {
    g_violations += !ok;
    b.push_back(g);
  }
  const auto la = EmpiricalLaw::discrete(a);
  const auto lb = EmpiricalLaw::discrete(b);
  const double between = tv_distance(la, lb);
  const double ea = tv_distance(la, exact);
  const double eb = tv_distance(lb, exact);
  o.require(between <= 0.03, "TV(conditioned, rejection)=" + fmt(between) + " (tol 0.03)");
  o.require(ea <= 0.02, "conditioned vs exact " + fmt(ea) + " (tol 0.02)");
  o.require(eb <= 0.02, "rejection vs exact " + fmt(eb) + " (tol 0.02)");
}

void c10(Outcome& o) {
  // Own sweep, so the criterion also stands alone; adds whatever earlier
  // criteria in this process recorded.
  const std::vector<std::pair<std::string, Environment>> envs{
      {"binary", critical_binary(400)},
      {"linear-mean", named(Schedule::poisson_linear_mean, 400)},
      {"exp-sqrt", named(Schedule::poisson_exp_sqrt, 400)},
      {"finite", Environment::constant(OffspringLaw::finite({0.3, 0.45, 0.2, 0.05}), 400)},
      {"line", Environment::constant(OffspringLaw::finite({0.0, 1.0}), 400)},
  };
  std::size_t paths = 0;
  for (const auto& [name, env] : envs) {
    for (std::size_t n : {1, 7, 64, 400}) {
      const auto curve = survival_curve(env, n);
      const auto table = moment_table(env, n);
      audit(table, curve, mrca_distribution(env, curve, table));
      const ReducedForestSampler sampler(env, curve);
      Rng rng = substream(1010, n);
      for (int i = 0; i < 2000; ++i, ++paths) audit(sampler.sample(rng));
      if (n <= 7 || (n == 64 && name == "binary")) {
        for (int i = 0; i < 200; ++i) {
          const auto r = sample_rejection(env, n, rng, 100000);
          if (r.path) audit(*r.path), ++paths;
        }
      }
    }
  }
  o.require(g_violations == 0, std::to_string(g_violations) + " violations (" + std::to_string(paths) +
                                   " paths in the sweep plus all tables and paths of this run)");
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "exact micro-oracle", 1, c1},
      {2, "shape-function identity", 10, c2},
      {3, "Kolmogorov asymptotics", 1, c3},
      {4, "MRCA gap decay", 30, c4},
      {5, "log-scale uniform MRCA (linear mean)", 30, c5},
      {6, "sqrt-scale exponential MRCA (exp-sqrt mean)", 10, c6},
      {7, "Yaglom limit", 60, c7},
      {8, "Yule marginals and first jump", 120, c8},
      {9, "sampler equivalence", 120, c9},
      {10, "shape invariants", 600, c10},
  };
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
  }
  int failures = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(secs < c.budget_seconds, "runtime " + fmt(secs) + "s (limit " + fmt(c.budget_seconds) + "s)");
    std::printf("criterion %2d %s  %s: %s\n", c.id, o.passed ? "PASS" : "FAIL", c.title, o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
