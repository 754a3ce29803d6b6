#pragma once

/// @file cli.hpp
/// @brief Batch experiment front-end: JSON config in, report files out.
///
/// Exit codes: 0 on success (checker violations are counted in the summary,
/// not fatal), 1 on runtime failure or on violations under --strict, 2 on a
/// malformed or schema-invalid config.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace plate {

struct CliOptions {
  std::string config_path;
  std::string out_dir;  // overrides the config's "out" when non-empty
  bool strict = false;
  int threads = 0;  // 0 = resolve from config, then PLATE_HARNACK_THREADS
  std::uint64_t seed = 0;
  bool seed_set = false;
};

/// Config rejected before any work starts; what() carries a JSON-pointer
/// style path to the offending entry.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError listing the first offending path.
void validate_config(const nlohmann::json& cfg);

struct RunOutcome {
  int violations = 0;
  std::vector<std::string> files_written;
  nlohmann::json summary;
};

/// Runs one validated config. Throws on runtime failures.
RunOutcome run_config(const nlohmann::json& cfg, const CliOptions& opts);

/// Full front-end: load, validate, dispatch, map errors to exit codes.
int run_cli(const CliOptions& opts);

}  // namespace plate
