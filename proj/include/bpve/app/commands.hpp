#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bpve/app/config.hpp"

namespace bpve::app {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumeric = 3, kExitValidation = 4 };

/// At least one validation check failed.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommandOptions {
  /// validate only: perturb the survival curve by 1e-3 before the identity check.
  bool inject_fault = false;
};

void cmd_analyze(const ExperimentConfig& cfg, std::ostream& log);
void cmd_survival(const ExperimentConfig& cfg, std::ostream& log);
void cmd_mrca(const ExperimentConfig& cfg, std::ostream& log);
void cmd_reduced(const ExperimentConfig& cfg, std::ostream& log);
void cmd_yaglom(const ExperimentConfig& cfg, std::ostream& log);
/// Throws ValidationFailure after writing the report if any check fails.
void cmd_validate(const ExperimentConfig& cfg, const CommandOptions& options, std::ostream& log);

struct ValidationCheck {
  std::string name;
  double value = 0.0;      // observed discrepancy
  double tolerance = 0.0;
  bool passed = false;
};

/// The built-in oracle suite: enumeration vs exact engine vs both samplers on
/// tiny environments.
std::vector<ValidationCheck> validation_suite(std::uint64_t seed, bool inject_fault);

/// Dispatches a command and maps failures to exit codes; messages go to err.
int run_command(const std::string& command, const ExperimentConfig& cfg,
                const CommandOptions& options, std::ostream& log, std::ostream& err);

}  // namespace bpve::app
