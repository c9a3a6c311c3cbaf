#include "bpve/app/output.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace bpve::app {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunHeader RunHeader::from(const std::string& command, const ExperimentConfig& cfg,
                          const std::string& environment) {
  RunHeader h;
  h.command = command;
  h.config_hash = cfg.hash();
  h.seed = cfg.seed;
  h.environment = environment;
  h.config = cfg.effective();
  h.defaults = cfg.defaults;
  return h;
}

std::vector<std::string> RunHeader::lines() const {
  std::vector<std::string> out;
  out.push_back("tool: " + std::string(kToolName) + " " + std::string(kToolVersion));
  out.push_back("command: " + command);
  out.push_back("config_hash: " + config_hash);
  out.push_back("seed: " + std::to_string(seed));
  out.push_back("environment: " + environment);
  out.push_back("config: " + config.dump());
  if (defaults) out.push_back("note: no config file given, built-in defaults used");
  return out;
}

nlohmann::json RunHeader::meta() const {
  nlohmann::json m{{"tool", kToolName},
                   {"version", kToolVersion},
                   {"command", command},
                   {"config_hash", config_hash},
                   {"seed", seed},
                   {"environment", nlohmann::json::parse(environment)},
                   {"config", config}};
  if (defaults) m["note"] = "no config file given, built-in defaults used";
  return m;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const RunHeader& header,
                     const std::vector<std::string>& columns)
    : out_(path), path_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  for (const auto& line : header.lines()) out_ << "# " << line << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_number(v))); }

CsvWriter& CsvWriter::cell(std::uint64_t v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view v) {
  if (filled_ == columns_) throw std::logic_error("csv row of " + path_.string() + " is full");
  out_ << (filled_ ? "," : "") << v;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("csv row of " + path_.string() + " is short");
  out_ << '\n';
  filled_ = 0;
}

void write_json(const std::filesystem::path& path, const RunHeader& header, nlohmann::json body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  body["meta"] = header.meta();
  out << body.dump(2) << '\n';
}

}  // namespace bpve::app
