#pragma once

#include <filesystem>
#include <string>

#include "svpg/net.hpp"
#include "svpg/types.hpp"

namespace svpg {

inline constexpr int kCheckpointFormatVersion = 1;

/// A network architecture plus its flat parameters. `extra_size` counts the
/// trailing entries appended by the owner after the network block (the
/// policy's log-std vector), so params.size() == spec.param_count() + extra_size.
struct ParamCheckpoint {
  NetSpec spec;
  std::size_t extra_size = 0;
  ParamVector params;
};

/// JSON document with a versioned header; doubles are written with
/// round-trip precision so save/load is lossless.
std::string to_json(const ParamCheckpoint& checkpoint);
ParamCheckpoint from_json(const std::string& text);

void save_checkpoint(const std::filesystem::path& path, const ParamCheckpoint& checkpoint);
ParamCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace svpg
