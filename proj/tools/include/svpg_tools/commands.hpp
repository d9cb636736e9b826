#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "svpg_tools/run_config.hpp"

namespace svpg::tools {

/// Trains per `config` and writes the run directory:
///   config.cfg (verbatim), config.resolved.cfg, VERSION, metrics.csv,
///   particles.csv, checkpoints/iter_K/particle_i.json, summary.json.
/// metrics.csv is flushed every iteration, so a failed run keeps its rows.
RunMetrics cmd_run(const RunConfig& config, std::size_t workers, std::ostream& log);

/// Merges metrics of completed runs on a shared cumulative-transition axis
/// (merged.csv) and writes a per-run summary table (summary.csv, also printed).
void cmd_compare(const std::vector<std::filesystem::path>& run_dirs, const std::filesystem::path& output_dir,
                 std::ostream& out);

struct VisitationOptions {
  std::vector<std::size_t> particles;  // empty: every checkpointed particle
  std::size_t episodes = 100;
  std::optional<std::size_t> iteration;  // default: latest checkpoint
  std::optional<std::uint64_t> seed;     // default: the run's seed
  std::optional<std::filesystem::path> output_dir;  // default: <run>/visitation
};

/// Rolls out checkpointed particles and dumps every visited state, one CSV per
/// particle named particle_<i>_return_<mean return>.csv. Returns the paths.
std::vector<std::filesystem::path> cmd_visitation(const std::filesystem::path& run_dir, const VisitationOptions& options,
                                                  std::ostream& out);

void cmd_env_info(std::optional<EnvId> env, std::ostream& out);

/// Path of the checkpoint of `particle` after iteration `iteration` (1-based).
std::filesystem::path checkpoint_path(const std::filesystem::path& run_dir, std::size_t iteration,
                                      std::size_t particle);

}  // namespace svpg::tools
