#include "bpve/app/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bpve::app {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError("config field '" + field + "': " + message);
}

const json& require(const json& obj, const char* key, const std::string& field) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(field + "." + key, "missing");
  return *it;
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(field, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::vector<double> as_numbers(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(as_number(j[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

OffspringLaw parse_law(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  const json& kind = require(j, "kind", field);
  if (!kind.is_string()) fail(field + ".kind", "expected a string");
  const auto name = kind.get<std::string>();
  try {
    if (name == "binary") return OffspringLaw::binary(as_number(require(j, "mean", field), field + ".mean"));
    if (name == "poisson") {
      return OffspringLaw::poisson(as_number(require(j, "lambda", field), field + ".lambda"));
    }
    if (name == "finite") {
      return OffspringLaw::finite(as_numbers(require(j, "weights", field), field + ".weights"));
    }
  } catch (const std::invalid_argument& e) {
    fail(field, e.what());
  }
  fail(field + ".kind", "unknown law kind '" + name + "' (expected finite, poisson or binary)");
}

EnvironmentDescriptor parse_environment(const json& j, const std::string& field) {
  if (!j.is_object()) fail(field, "expected an object");
  const json& schedule = require(j, "schedule", field);
  if (!schedule.is_string()) fail(field + ".schedule", "expected a string");
  EnvironmentDescriptor d;
  try {
    d.schedule = parse_schedule(schedule.get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail(field + ".schedule", e.what());
  }
  switch (d.schedule) {
    case Schedule::constant: d.law = parse_law(require(j, "law", field), field + ".law"); break;
    case Schedule::poisson_explicit: {
      d.lambdas = as_numbers(require(j, "lambdas", field), field + ".lambdas");
      if (d.lambdas.empty()) fail(field + ".lambdas", "must not be empty");
      for (std::size_t i = 0; i < d.lambdas.size(); ++i) {
        if (!(d.lambdas[i] > 0.0)) fail(field + ".lambdas[" + std::to_string(i) + "]", "must be positive");
      }
      break;
    }
    case Schedule::explicit_list: {
      const json& laws = require(j, "laws", field);
      if (!laws.is_array() || laws.empty()) fail(field + ".laws", "expected a nonempty array");
      for (std::size_t i = 0; i < laws.size(); ++i) {
        d.laws.push_back(parse_law(laws[i], field + ".laws[" + std::to_string(i) + "]"));
      }
      break;
    }
    default: break;
  }
  return d;
}

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                      ": JSON syntax error: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError(source + ": top level must be a JSON object");

  ExperimentConfig c;
  c.environment_json = require(doc, "environment", "");
  c.environment = parse_environment(c.environment_json, "environment");
  if (auto it = doc.find("horizons"); it != doc.end()) {
    if (!it->is_array()) fail("horizons", "expected an array of integers");
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.horizons.push_back(as_count((*it)[i], "horizons[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = doc.find("horizon"); it != doc.end()) c.horizons.push_back(as_count(*it, "horizon"));
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) fail("seed", "expected an unsigned 64-bit integer");
    c.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("replicates"); it != doc.end()) c.replicates = as_count(*it, "replicates");
  if (auto it = doc.find("t_grid"); it != doc.end()) {
    c.t_grid = as_numbers(*it, "t_grid");
    for (double t : c.t_grid) {
      if (!(t >= 0.0 && t < 1.0)) fail("t_grid", "entries must lie in [0, 1)");
    }
  }
  if (auto it = doc.find("k_grid"); it != doc.end()) {
    if (!it->is_array()) fail("k_grid", "expected an array of integers");
    for (std::size_t i = 0; i < it->size(); ++i) {
      c.k_grid.push_back(as_count((*it)[i], "k_grid[" + std::to_string(i) + "]"));
    }
  }
  if (auto it = doc.find("dump_paths"); it != doc.end()) {
    if (!it->is_boolean()) fail("dump_paths", "expected true or false");
    c.dump_paths = it->get<bool>();
  }
  if (auto it = doc.find("output_dir"); it != doc.end()) {
    if (!it->is_string()) fail("output_dir", "expected a string");
    c.output_dir = it->get<std::string>();
  }
  if (auto it = doc.find("threads"); it != doc.end()) {
    c.threads = static_cast<unsigned>(std::max<std::size_t>(1, as_count(*it, "threads")));
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

ExperimentConfig default_config() {
  ExperimentConfig c = parse_config(
      R"({"environment": {"schedule": "constant", "law": {"kind": "binary", "mean": 1.0}},
          "horizons": [64]})",
      "<defaults>");
  c.defaults = true;
  return c;
}

std::size_t ExperimentConfig::max_horizon() const {
  if (horizons.empty()) throw ConfigError("config field 'horizons': no horizon given");
  return *std::max_element(horizons.begin(), horizons.end());
}

Environment ExperimentConfig::build_environment() const {
  EnvironmentDescriptor d = environment;
  const bool listed = d.schedule == Schedule::poisson_explicit || d.schedule == Schedule::explicit_list;
  if (!listed || !horizons.empty()) d.horizon = max_horizon();
  try {
    return Environment::build(std::move(d));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'environment': ") + e.what());
  }
}

nlohmann::json ExperimentConfig::effective() const {
  return json{{"environment", environment_json}, {"horizons", horizons}, {"seed", seed},
              {"replicates", replicates},        {"t_grid", t_grid},     {"k_grid", k_grid},
              {"dump_paths", dump_paths}};
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : effective().dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bpve::app
