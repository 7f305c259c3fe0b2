#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "predsaddle/config.hpp"

namespace predsaddle {

struct SeedRunInfo {
  std::uint64_t seed = 0;
  std::vector<std::string> files;  // relative to the output directory
  double wall_seconds = 0.0;
  bool collapsed = false;
};

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string experiment;
  std::vector<SeedRunInfo> seed_runs;
  std::vector<std::string> aggregate_files;
  bool any_collapse = false;
};

struct RunOverrides {
  std::optional<std::uint64_t> seed;        // replaces the config seed list
  std::optional<std::string> output_dir;
};

// Executes the configured experiment, writing one CSV per seed plus aggregate
// CSVs and manifest.json under the output directory. CSV contents are a pure
// function of the config (wall-clock times live only in the manifest).
RunManifest run_experiment(const ExperimentConfig& cfg, const RunOverrides& overrides = {});

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace predsaddle
