#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bpve/app/config.hpp"

namespace bpve::app {

inline constexpr std::string_view kToolName = "bpve";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// %.17g
std::string format_number(double v);

/// What every output file echoes about the run that produced it.
struct RunHeader {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string environment;  // Environment::describe()
  nlohmann::json config;    // effective configuration
  bool defaults = false;

  static RunHeader from(const std::string& command, const ExperimentConfig& cfg,
                        const std::string& environment);
  std::vector<std::string> lines() const;
  nlohmann::json meta() const;
};

/// CSV file with a '#'-prefixed header block followed by one column row.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const RunHeader& header,
            const std::vector<std::string>& columns);

  CsvWriter& cell(double v);
  CsvWriter& cell(std::uint64_t v);
  CsvWriter& cell(std::string_view v);
  void end_row();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t columns_ = 0;
  std::size_t filled_ = 0;
};

/// Writes body with a "meta" member holding the run header.
void write_json(const std::filesystem::path& path, const RunHeader& header, nlohmann::json body);

}  // namespace bpve::app
