#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svpg/rng.hpp"

namespace svpg {

/// Benchmark tasks. Registry ids: "cartpole", "mountaincar", "swingup",
/// "doublependulum".
enum class EnvId { cartpole, mountaincar, swingup, double_pendulum };

EnvId parse_env_id(std::string_view id);
std::string_view env_name(EnvId id);
std::span<const EnvId> all_envs();

inline constexpr std::size_t kMaxEpisodeLength = 500;

/// `internal` is the full simulator state; `observation` is what the policy sees.
struct EnvState {
  Eigen::VectorXd observation;
  Eigen::VectorXd internal;
};

struct StepResult {
  EnvState next_state;
  double reward = 0.0;
  bool terminal = false;
};

struct EnvInfo {
  std::size_t obs_dim = 0;
  std::size_t action_dim = 0;
  Eigen::VectorXd action_low;
  Eigen::VectorXd action_high;
  std::size_t max_episode_length = kMaxEpisodeLength;
};

struct EnvConstant {
  std::string name;
  double value;
  std::string unit;
};

EnvInfo env_info(EnvId id);

/// Physical constants of the environment, for auditing.
std::vector<EnvConstant> env_constants(EnvId id);

/// Number of uniform [-1, 1] variates consumed by a reset.
std::size_t reset_noise_dim(EnvId id);

/// Initial state as a deterministic function of the reset noise; all-zero
/// noise gives the nominal start (upright cartpole, hanging swing-up, ...).
EnvState env_reset_from_noise(EnvId id, std::span<const double> unit_noise);

EnvState env_reset(EnvId id, Rng& rng);

/// Builds a state (observation included) from a full simulator state.
EnvState make_state(EnvId id, const Eigen::Ref<const Eigen::VectorXd>& internal);

/// Advances one control interval. Actions are clipped to the bounds in
/// env_info before they reach the dynamics.
StepResult env_step(EnvId id, const EnvState& state, const Eigen::Ref<const Eigen::VectorXd>& action);

/// Total mechanical energy (J) of the pendulum systems, with the potential
/// measured from the hanging configuration. Throws for mountaincar.
double mechanical_energy(EnvId id, const EnvState& state);

}  // namespace svpg
