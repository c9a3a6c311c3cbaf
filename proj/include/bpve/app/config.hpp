#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bpve/environment.hpp"

namespace bpve::app {

/// Malformed or inconsistent experiment configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultSeed = 20240601;

struct ExperimentConfig {
  EnvironmentDescriptor environment;
  nlohmann::json environment_json;
  std::vector<std::size_t> horizons;
  std::uint64_t seed = kDefaultSeed;
  std::size_t replicates = 1000;
  std::vector<double> t_grid{0.25, 0.5, 0.75};
  std::vector<std::size_t> k_grid;
  bool dump_paths = false;
  std::filesystem::path output_dir = ".";
  unsigned threads = 1;
  /// True when no config file was given and the built-in defaults apply.
  bool defaults = false;

  std::size_t max_horizon() const;
  Environment build_environment() const;
  /// Everything that determines the numerical output (not threads, not the
  /// output directory), as canonical JSON.
  nlohmann::json effective() const;
  /// FNV-1a of effective().dump(), as 16 hex digits.
  std::string hash() const;
};

/// Parses a JSON document. Syntax errors report line and column; schema
/// errors name the offending field.
ExperimentConfig parse_config(std::string_view text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);
/// Built-in defaults: constant binary law with mean 1, horizon 64.
ExperimentConfig default_config();

OffspringLaw parse_law(const nlohmann::json& j, const std::string& field);
EnvironmentDescriptor parse_environment(const nlohmann::json& j, const std::string& field);

}  // namespace bpve::app
