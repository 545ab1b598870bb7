// Declarative scenario configs for the command-line front end: strict JSON
// parsing (unknown keys rejected with suggestions), dispatch into the library,
// CSV outputs and a reproducibility manifest.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qthermo/bath.hpp"
#include "qthermo/field_map.hpp"
#include "qthermo/machines.hpp"
#include "qthermo/protocol.hpp"

namespace qthermo::cli {

struct SchemaIssue {
  std::string path;
  std::string message;
};

struct Scenario {
  std::string command;
  nlohmann::json raw;

  FieldMap map = FieldMap::planar_xz();
  std::vector<BathSpec> baths;
  std::optional<Protocol> protocol;

  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  double tolerance = 1e-6;  // node-doubling / convergence tolerance
  int threads = 1;
};

// Parse and validate; throws ConfigError with a readable message listing all
// issues. validate_only skips cross-field requirements needed only to run.
Scenario parse_scenario(const nlohmann::json& j, std::vector<SchemaIssue>* issues_out = nullptr);

// Schema report without executing numerics; returns issues (empty = valid).
std::vector<SchemaIssue> validate_config(const nlohmann::json& j);

struct RunOptions {
  std::filesystem::path config_path;
  std::filesystem::path out_dir_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<double> tolerance_override;
  int threads = 0;  // 0: take from config / env
};

// Execute a scenario; returns the process exit code (0 ok, 2 config, 3 numeric).
int run_scenario(const RunOptions& opts);
int validate_scenario(const std::filesystem::path& config_path);

// FNV-1a 64-bit, used for the config hash in the manifest.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace qthermo::cli
