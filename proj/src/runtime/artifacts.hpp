#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "runtime/config.hpp"

namespace digirr::runtime {

struct RunRequest {
  ScenarioConfig config;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;  // sim s; config value when absent
  double accel = 0.0;              // sim s per wall s, 0 = as fast as possible
  std::filesystem::path out_dir;
};

struct RunResult {
  std::filesystem::path manifest;
  std::uint64_t seed = 0;
  std::uint64_t ticks = 0;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> artifacts;  // file name -> sha256
  std::vector<std::string> warnings;
};

// Runs the scenario and writes history.csv, actuation_log.csv,
// status_table.json, control_table.json, commands.json and manifest.json
// into out_dir. Files are written under temporary names and only renamed
// into place once the run finishes, so a failed run leaves nothing behind.
// `cancel` is polled between ticks.
RunResult run_to_directory(const RunRequest& request, const std::function<bool()>& cancel = {});

// Rebuilds the request recorded in a manifest. Throws Error(config) when the
// embedded config text no longer matches its recorded hash.
RunRequest request_from_manifest(const std::filesystem::path& manifest);

}  // namespace digirr::runtime
