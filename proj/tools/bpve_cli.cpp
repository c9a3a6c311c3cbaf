#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bpve/app/commands.hpp"
#include "bpve/app/config.hpp"
#include "bpve/app/output.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicates;
  std::vector<std::size_t> horizons;
  std::optional<unsigned> threads;
  bool inject_fault = false;
  bool dump_paths = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON experiment file (defaults are used when absent)");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--replicates", f.replicates, "number of replicates");
  cmd->add_option("--horizon", f.horizons, "horizon n; repeat for several")->take_all();
  cmd->add_option("--threads", f.threads, "worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bpve::app;
  CLI::App app{"Branching processes in varying environments: exact tables and genealogy sampling"};
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"analyze", "moment table and criticality report"},
      {"survival", "exact survival probabilities against 2/rho_n"},
      {"mrca", "exact law of the most recent common ancestor"},
      {"reduced", "sampled reduced process against the Yule marginals"},
      {"yaglom", "sampled Z_n/b_n against the exponential law"},
      {"validate", "built-in oracle cross-checks"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags);
    if (std::string(name) == "validate") {
      cmd->add_flag("--inject-fault", flags.inject_fault, "perturb the survival curve (self-test)");
    }
    if (std::string(name) == "reduced") {
      cmd->add_flag("--dump-paths", flags.dump_paths, "also write every sampled path");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    cfg = flags.config.empty() ? default_config() : load_config(flags.config);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  if (!flags.horizons.empty()) cfg.horizons = flags.horizons;
  if (flags.threads) cfg.threads = *flags.threads;
  if (flags.dump_paths) cfg.dump_paths = true;

  CommandOptions options;
  options.inject_fault = flags.inject_fault;
  return run_command(command, cfg, options, std::cout, std::cerr);
}
