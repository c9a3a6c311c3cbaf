#include "bpve/app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>

#include "bpve/app/output.hpp"
#include "bpve/app/parallel.hpp"
#include "bpve/enumeration.hpp"
#include "bpve/errors.hpp"
#include "bpve/exact_engine.hpp"
#include "bpve/genealogy_sim.hpp"
#include "bpve/moments.hpp"
#include "bpve/stats.hpp"

namespace bpve::app {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Run {
  Environment env;
  RunHeader header;
  fs::path dir;
};

Run prepare(const std::string& command, const ExperimentConfig& cfg) {
  Environment env = cfg.build_environment();
  fs::create_directories(cfg.output_dir);
  return {env, RunHeader::from(command, cfg, env.describe()), cfg.output_dir};
}

std::vector<std::size_t> sorted_horizons(const ExperimentConfig& cfg) {
  std::vector<std::size_t> hs = cfg.horizons;
  if (hs.empty()) throw ConfigError("config field 'horizons': no horizon given");
  std::sort(hs.begin(), hs.end());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
  if (hs.front() == 0) throw ConfigError("config field 'horizons': horizons must be positive");
  return hs;
}

std::string suffix(std::size_t n) { return "_n" + std::to_string(n) + ".csv"; }

// Independent stream family per horizon.
std::uint64_t horizon_seed(std::uint64_t seed, std::size_t n) {
  std::uint64_t s = seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(n) + 1));
  return splitmix64(s);
}

void require_replicates(const ExperimentConfig& cfg) {
  if (cfg.replicates == 0) throw ConfigError("config field 'replicates': must be positive");
}

json report_json(const CriticalityReport& r) {
  json checkpoints = json::array();
  for (const auto& c : r.checkpoints) {
    checkpoints.push_back({{"generation", c.generation}, {"log_rho", c.log_rho}, {"log_mu_rho", c.log_mu_rho}});
  }
  json star = json::array();
  for (const auto& s : r.star) {
    star.push_back({{"epsilon", s.epsilon}, {"max_constant", s.max_constant},
                    {"argmax_generation", s.argmax_generation}});
  }
  return {{"horizon", r.horizon},           {"rho_n", r.rho_n},
          {"log_rho_n", r.log_rho_n},       {"mu_rho_n", r.mu_rho_n},
          {"log_mu_rho_n", r.log_mu_rho_n}, {"rho_growth", r.rho_growth},
          {"mu_rho_growth", r.mu_rho_growth}, {"verdict", to_string(r.verdict)},
          {"checkpoints", checkpoints},     {"star", star}};
}

IntegerLaw table_law(const std::vector<double>& masses) {
  std::map<std::uint64_t, double> m;
  for (std::size_t k = 0; k < masses.size(); ++k) m[k] = masses[k];
  return IntegerLaw::table(std::move(m));
}

IntegerLaw table_law(const std::map<std::uint32_t, double>& masses) {
  std::map<std::uint64_t, double> m;
  for (const auto& [k, p] : masses) m[k] = p;
  return IntegerLaw::table(std::move(m));
}

}  // namespace

void cmd_analyze(const ExperimentConfig& cfg, std::ostream& log) {
  const auto hs = sorted_horizons(cfg);
  Run run = prepare("analyze", cfg);
  const MomentTable table = moment_table(run.env, hs.back());

  CsvWriter csv(run.dir / "moments.csv", run.header, {"k", "mean_k", "nu_k", "log_mu_k", "rho_k"});
  for (std::size_t k = 0; k <= table.horizon; ++k) {
    csv.cell(std::uint64_t{k}).cell(table.mean[k]).cell(table.nu[k]).cell(table.log_mu[k]).cell(table.rho[k]);
    csv.end_row();
  }

  json reports = json::array();
  for (std::size_t n : hs) {
    if (n < kMinClassifyHorizon) {
      reports.push_back({{"horizon", n}, {"rho_n", table.rho[n]}, {"log_rho_n", table.log_rho[n]},
                         {"verdict", "unclassified"},
                         {"reason", "horizon below " + std::to_string(kMinClassifyHorizon)}});
      continue;
    }
    MomentTable sub = moment_table(run.env, n);
    reports.push_back(report_json(classify(sub, run.env)));
  }
  write_json(run.dir / "criticality.json", run.header, {{"reports", reports}});
  log << "analyze: rho_" << table.horizon << " = " << format_number(table.rho[table.horizon]) << '\n';
}

void cmd_survival(const ExperimentConfig& cfg, std::ostream& log) {
  const auto hs = sorted_horizons(cfg);
  Run run = prepare("survival", cfg);
  CsvWriter csv(run.dir / "survival.csv", run.header, {"n", "P", "two_over_rho_n", "ratio"});
  for (std::size_t n : hs) {
    const SurvivalCurve curve = survival_curve(run.env, n);
    const MomentTable table = moment_table(run.env, n);
    const double ratio = std::exp(curve.log_u[0] + table.log_rho[n] - std::log(2.0));
    csv.cell(std::uint64_t{n}).cell(curve.survival()).cell(std::exp(std::log(2.0) - table.log_rho[n])).cell(ratio);
    csv.end_row();

    CsvWriter c(run.dir / ("curve" + suffix(n)), run.header, {"k", "u_k", "log_u_k"});
    for (std::size_t k = 0; k <= n; ++k) {
      c.cell(std::uint64_t{k}).cell(curve.u[k]).cell(curve.log_u[k]);
      c.end_row();
    }
    log << "survival: n=" << n << " P=" << format_number(curve.survival())
        << " ratio=" << format_number(ratio) << '\n';
  }
}

void cmd_mrca(const ExperimentConfig& cfg, std::ostream& log) {
  const auto hs = sorted_horizons(cfg);
  Run run = prepare("mrca", cfg);
  json summary = json::array();
  for (std::size_t n : hs) {
    const SurvivalCurve curve = survival_curve(run.env, n);
    const MomentTable table = moment_table(run.env, n);
    const MrcaDistribution d = mrca_distribution(run.env, curve, table);

    CsvWriter csv(run.dir / ("mrca" + suffix(n)), run.header, {"k", "cdf_k", "rho_k_over_rho_n", "abs_gap"});
    double max_gap = 0.0;
    std::size_t argmax = 0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double gap = std::abs(d.cdf[k] - d.reference[k]);
      if (gap > max_gap) {
        max_gap = gap;
        argmax = k;
      }
      csv.cell(std::uint64_t{k}).cell(d.cdf[k]).cell(d.reference[k]).cell(gap);
      csv.end_row();
    }
    const ConditionalMean cm = conditional_mean(curve, table);
    summary.push_back({{"horizon", n}, {"max_gap", max_gap}, {"argmax", argmax},
                       {"survival", curve.survival()}, {"log_survival", curve.log_u[0]},
                       {"conditional_mean", cm.exact}});

    const Schedule s = cfg.environment.schedule;
    if (s == Schedule::poisson_linear_mean) {
      // log G_n / log n against the uniform law.
      CsvWriter r(run.dir / ("mrca_logscale" + suffix(n)), run.header, {"t", "k", "cdf_k", "reference", "abs_gap"});
      for (int i = 1; i < 20; ++i) {
        const double t = 0.05 * i;
        const auto k = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), t)));
        r.cell(t).cell(std::uint64_t{k}).cell(d.cdf[k]).cell(t).cell(std::abs(d.cdf[k] - t));
        r.end_row();
      }
    } else if (s == Schedule::poisson_exp_sqrt) {
      // (n - G_n) / (2 sqrt n) against the standard exponential.
      CsvWriter r(run.dir / ("mrca_sqrtscale" + suffix(n)), run.header,
                  {"t", "k", "cdf_k", "exp_neg_t", "tail_k", "one_minus_exp_neg_t"});
      const double w = 2.0 * std::sqrt(static_cast<double>(n));
      for (int i = 1; i <= 30; ++i) {
        const double t = 0.1 * i;
        const double drop = std::floor(t * w);
        if (drop > static_cast<double>(n)) break;
        const auto k = n - static_cast<std::size_t>(drop);
        // P((n - G)/(2 sqrt n) <= t) = P(G >= n - t w) = tail[k]
        r.cell(t).cell(std::uint64_t{k}).cell(d.cdf[k]).cell(std::exp(-t)).cell(d.tail[k]).cell(-std::expm1(-t));
        r.end_row();
      }
    }
    log << "mrca: n=" << n << " max_gap=" << format_number(max_gap) << '\n';
  }
  write_json(run.dir / "mrca_summary.json", run.header, {{"horizons", summary}});
}

void cmd_reduced(const ExperimentConfig& cfg, std::ostream& log) {
  require_replicates(cfg);
  const auto hs = sorted_horizons(cfg);
  Run run = prepare("reduced", cfg);
  for (std::size_t n : hs) {
    const SurvivalCurve curve = survival_curve(run.env, n);
    const MomentTable table = moment_table(run.env, n);
    const ReducedForestSampler sampler(run.env, curve);
    const bool degenerate = table.rho[n] == 0.0;

    std::vector<std::size_t> ks;
    if (!degenerate) {
      for (double t : cfg.t_grid) ks.push_back(time_change(table, t));
    }
    struct Record {
      std::vector<std::uint64_t> at;
      std::size_t mrca = 0;
      std::vector<std::uint64_t> z;
    };
    const bool keep = cfg.dump_paths;
    auto records = replicate(horizon_seed(cfg.seed, n), cfg.replicates, cfg.threads,
                             [&](std::size_t, Rng& rng) {
                               ReducedPath p = sampler.sample(rng);
                               check_path_shape(p);
                               Record r;
                               for (std::size_t k : ks) r.at.push_back(p.z[k]);
                               r.mrca = p.mrca_generation();
                               if (keep) r.z = std::move(p.z);
                               return r;
                             });

    CsvWriter csv(run.dir / ("reduced" + suffix(n)), run.header, {"t", "k", "j", "empirical", "reference", "tv"});
    json marginals = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double t = cfg.t_grid[i];
      std::map<std::uint64_t, std::uint64_t> counts;
      for (const auto& r : records) ++counts[r.at[i]];
      const EmpiricalLaw law = EmpiricalLaw::from_counts(counts);
      const IntegerLaw ref = IntegerLaw::geometric(1.0 - t);
      const double tv = tv_distance(law, ref);
      const std::uint64_t top = counts.rbegin()->first;
      for (std::uint64_t j = 1; j <= top; ++j) {
        csv.cell(t).cell(std::uint64_t{ks[i]}).cell(j).cell(law.frequency(j)).cell(ref.pmf(j)).cell(tv);
        csv.end_row();
      }
      marginals.push_back({{"t", t}, {"k", ks[i]}, {"tv", tv}, {"mean", law.mean()}});
    }

    FirstJumpSample first;
    for (const auto& r : records) {
      double t = r.mrca >= n ? 1.0 : table.rho_ratio(r.mrca + 1);
      if (t >= 1.0) {
        t = 1.0;
        ++first.censored;
      }
      first.times.push_back(t);
    }
    const EmpiricalLaw times = EmpiricalLaw::continuous(first.times);
    const double ks_uniform = ks_distance(times, ContinuousReference::uniform(0.0, 1.0), std::pair{0.0, 0.9});
    bool non_critical = degenerate;
    if (!degenerate && n >= kMinClassifyHorizon) {
      non_critical = classify(table, run.env).verdict != Verdict::looks_critical;
    }
    json body{{"horizon", n},
              {"replicates", cfg.replicates},
              {"marginals", marginals},
              {"first_jump", {{"ks_uniform_0_0.9", ks_uniform},
                              {"median", times.quantile(0.5)},
                              {"censored", first.censored}}},
              {"non_critical", non_critical}};
    if (degenerate) body["note"] = "rho_n = 0: no branching, time change undefined, marginals skipped";
    write_json(run.dir / ("reduced_summary_n" + std::to_string(n) + ".json"), run.header, body);

    if (keep) {
      CsvWriter paths(run.dir / ("reduced_paths" + suffix(n)), run.header, {"replicate", "k", "z"});
      for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t k = 0; k < records[i].z.size(); ++k) {
          paths.cell(std::uint64_t{i}).cell(std::uint64_t{k}).cell(records[i].z[k]);
          paths.end_row();
        }
      }
    }
    log << "reduced: n=" << n << " first-jump KS=" << format_number(ks_uniform)
        << (non_critical ? " (input does not look critical)" : "") << '\n';
  }
}

void cmd_yaglom(const ExperimentConfig& cfg, std::ostream& log) {
  require_replicates(cfg);
  const auto hs = sorted_horizons(cfg);
  Run run = prepare("yaglom", cfg);
  json summary = json::array();
  for (std::size_t n : hs) {
    const SurvivalCurve curve = survival_curve(run.env, n);
    const MomentTable table = moment_table(run.env, n);
    const double b = conditional_mean(curve, table).exact;
    const ReducedForestSampler sampler(run.env, curve);
    auto values = replicate(horizon_seed(cfg.seed, n), cfg.replicates, cfg.threads,
                            [&](std::size_t, Rng& rng) {
                              const ReducedPath p = sampler.sample(rng);
                              check_path_shape(p);
                              return static_cast<double>(p.z[n]) / b;
                            });
    const EmpiricalLaw law = EmpiricalLaw::continuous(values);
    const double ks = ks_distance(law, ContinuousReference::exponential(1.0));

    CsvWriter csv(run.dir / ("yaglom" + suffix(n)), run.header, {"i", "z_over_b"});
    for (std::size_t i = 0; i < law.samples().size(); ++i) {
      csv.cell(std::uint64_t{i}).cell(law.samples()[i]);
      csv.end_row();
    }
    summary.push_back({{"horizon", n}, {"b_n", b}, {"replicates", cfg.replicates}, {"ks_exponential", ks},
                       {"sample_mean", law.mean()}});
    log << "yaglom: n=" << n << " KS=" << format_number(ks) << '\n';
  }
  write_json(run.dir / "yaglom_summary.json", run.header, {{"horizons", summary}});
}

std::vector<ValidationCheck> validation_suite(std::uint64_t seed, bool inject_fault) {
  std::vector<ValidationCheck> out;
  auto check = [&](std::string name, double value, double tol) {
    out.push_back({std::move(name), value, tol, std::isfinite(value) && value <= tol});
  };
  auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };

  // Smallest critical case, by hand.
  {
    const Environment env = Environment::constant(OffspringLaw::binary(1.0), 2);
    const SurvivalCurve curve = survival_curve(env, 2);
    const MomentTable table = moment_table(env, 2);
    const MrcaDistribution d = mrca_distribution(env, curve, table);
    const EnumerationResult e = enumerate_small(env, 2, 16);
    check("binary n=2 P(Z_2>0)=3/8", std::abs(curve.survival() - 0.375), 1e-12);
    check("binary n=2 P(G>=1)=2/3", std::abs(d.tail[1] - 2.0 / 3.0), 1e-12);
    check("binary n=2 P(Z_{1,2}=2)=1/3", std::abs(e.reduced_law(1).at(2) - 1.0 / 3.0), 1e-12);
    check("binary n=2 b_2=8/3", std::abs(conditional_mean(curve, table).exact - 8.0 / 3.0), 1e-12);
  }

  struct Case {
    std::string name;
    Environment env;
  };
  const std::vector<Case> cases{
      {"mixed n=4", Environment::from_laws({OffspringLaw::finite({0.2, 0.5, 0.3}), OffspringLaw::binary(1.2),
                                           OffspringLaw::finite({0.3, 0.4, 0.2, 0.1}),
                                           OffspringLaw::finite({0.25, 0.5, 0.25})})},
      {"finite n=5", Environment::constant(OffspringLaw::finite({0.3, 0.3, 0.4}), 5)},
  };
  std::size_t shape_violations = 0;
  for (const auto& c : cases) {
    const std::size_t n = c.env.horizon();
    const SurvivalCurve curve = survival_curve(c.env, n);
    const MomentTable table = moment_table(c.env, n);
    const MrcaDistribution d = mrca_distribution(c.env, curve, table);
    const EnumerationResult e = enumerate_small(c.env, n, kMaxEnumerationCap);

    check(c.name + " truncated mass", e.truncated_mass, 0.0);
    check(c.name + " survival engine vs enumeration", rel(curve.survival(), e.survival_probability()), 1e-10);
    double tail_gap = 0.0;
    for (std::size_t k = 0; k <= n; ++k) tail_gap = std::max(tail_gap, std::abs(d.tail[k] - e.mrca_tail(k)));
    check(c.name + " mrca tail engine vs enumeration", tail_gap, 1e-10);
    check(c.name + " conditional mean engine vs enumeration",
          rel(conditional_mean(curve, table).exact, e.conditional_mean()), 1e-10);

    SurvivalCurve probe = curve;
    if (inject_fault) {
      for (std::size_t k = 1; k < n; ++k) {
        probe.u[k] += 1e-3;
        probe.log_u[k] = std::log(probe.u[k]);
      }
    }
    check(c.name + " shape identity", rel(survival_via_shape_identity(c.env, probe, table), curve.survival()), 1e-9);

    const SurvivalCurve iterated = survival_curve_by_iteration(c.env, n);
    double iter_gap = 0.0;
    for (std::size_t k = 0; k <= n; ++k) iter_gap = std::max(iter_gap, rel(curve.u[k], iterated.u[k]));
    check(c.name + " recursion vs iteration", iter_gap, 1e-12);

    for (std::size_t k = 1; k <= n; ++k) {
      if (table.rho[k] < table.rho[k - 1] || d.tail[k] > d.tail[k - 1]) ++shape_violations;
    }
    if (curve.u[n] != 1.0) ++shape_violations;

    // Samplers against the enumerated law of G_n and of Z_{n/2,n}.
    constexpr std::size_t kSamples = 20000;
    const std::size_t mid = n / 2;
    const IntegerLaw g_exact = table_law(e.mrca_law());
    const IntegerLaw z_exact = table_law(e.reduced_law(mid));
    const ReducedForestSampler sampler(c.env, curve);
    auto exact_paths = replicate(horizon_seed(seed, n), kSamples, 1, [&](std::size_t, Rng& rng) {
      return sampler.sample(rng);
    });
    auto rejected_paths = replicate(horizon_seed(seed + 1, n), kSamples, 1, [&](std::size_t, Rng& rng) {
      auto r = sample_rejection(c.env, n, rng, 1'000'000);
      if (!r.path) throw NumericError("validate: rejection sampler found no survivor", n);
      return *r.path;
    });
    for (const auto* paths : {&exact_paths, &rejected_paths}) {
      const std::string who = paths == &exact_paths ? " conditioned" : " rejection";
      std::vector<std::uint64_t> g, z;
      for (const auto& p : *paths) {
        if (!p.well_formed()) ++shape_violations;
        g.push_back(p.mrca_generation());
        z.push_back(p.z[mid]);
      }
      check(c.name + who + " sampler G_n TV", tv_distance(EmpiricalLaw::discrete(g), g_exact), 0.03);
      check(c.name + who + " sampler Z_{n/2,n} TV", tv_distance(EmpiricalLaw::discrete(z), z_exact), 0.03);
    }
  }
  check("shape invariant violations", static_cast<double>(shape_violations), 0.0);
  return out;
}

void cmd_validate(const ExperimentConfig& cfg, const CommandOptions& options, std::ostream& log) {
  fs::create_directories(cfg.output_dir);
  const RunHeader header = RunHeader::from("validate", cfg, cfg.build_environment().describe());
  const auto checks = validation_suite(cfg.seed, options.inject_fault);
  json rows = json::array();
  bool all = true;
  if (cfg.defaults) log << "validate: no config file given, built-in defaults used\n";
  for (const auto& c : checks) {
    all = all && c.passed;
    rows.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"passed", c.passed}});
    log << (c.passed ? "PASS " : "FAIL ") << c.name << " value=" << format_number(c.value)
        << " tol=" << format_number(c.tolerance) << '\n';
  }
  write_json(fs::path(cfg.output_dir) / "validate.json", header,
             {{"passed", all}, {"fault_injected", options.inject_fault}, {"checks", rows}});
  if (!all) throw ValidationFailure("validate: at least one check failed");
}

int run_command(const std::string& command, const ExperimentConfig& cfg, const CommandOptions& options,
                std::ostream& log, std::ostream& err) {
  try {
    if (command == "analyze") cmd_analyze(cfg, log);
    else if (command == "survival") cmd_survival(cfg, log);
    else if (command == "mrca") cmd_mrca(cfg, log);
    else if (command == "reduced") cmd_reduced(cfg, log);
    else if (command == "yaglom") cmd_yaglom(cfg, log);
    else if (command == "validate") cmd_validate(cfg, options, log);
    else throw ConfigError("unknown command '" + command + "'");
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ValidationFailure& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace bpve::app
