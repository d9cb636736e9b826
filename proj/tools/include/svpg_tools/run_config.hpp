#pragma once

#include <filesystem>
#include <string>

#include "svpg/trainer.hpp"

namespace svpg::tools {

/// Everything a `run` needs. Parsed from a flat `key = value` file; see
/// README.md for the schema.
struct RunConfig {
  TrainConfig train;
  std::filesystem::path output_dir = "runs/default";
  /// Checkpoint every K iterations (0: final iteration only).
  std::size_t checkpoint_every = 0;
  /// The config text exactly as read, copied into the output directory.
  std::string source_text;
};

/// Throws ConfigError with "line N: key: message" on any bad field.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Canonical `key = value` rendering of every field (defaults included).
std::string render_run_config(const RunConfig& config);

}  // namespace svpg::tools
