#pragma once

#include <cstdint>
#include <random>

namespace svpg {

using Rng = std::mt19937_64;

/// What a random stream is used for. Part of the stream key so that, e.g.,
/// evaluation noise never aliases rollout noise.
enum class StreamPurpose : std::uint64_t {
  init = 1,
  rollout = 2,
  evaluation = 3,
  critic = 4,
  es_noise = 5,
  es_rollout = 6,
  final_evaluation = 7,
  visitation = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of agent `index` under master seed `seed`. An n=1 run with seed
/// `agent_seed(s, i)` reproduces agent i of an n-agent run with seed s.
constexpr std::uint64_t agent_seed(std::uint64_t seed, std::uint64_t index) { return seed + index; }

/// Counter-based stream derivation: the stream depends only on the key, never
/// on execution order, so serial and parallel fan-out draw identical numbers.
Rng make_stream(std::uint64_t agent_seed, std::uint64_t iteration, StreamPurpose purpose,
                std::uint64_t sub = 0);

}  // namespace svpg
