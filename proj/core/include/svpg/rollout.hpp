#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "svpg/envs.hpp"
#include "svpg/policy.hpp"
#include "svpg/rng.hpp"

namespace svpg {

/// One episode. Column t of `observations`/`actions` is (s_t, a_t); actions
/// are stored before clipping. `final_observation` is s_T, the state after the
/// last step (used to bootstrap truncated episodes).
struct Trajectory {
  Eigen::MatrixXd observations;
  Eigen::MatrixXd actions;
  std::vector<double> rewards;
  std::vector<double> log_probs;
  bool terminal = false;
  Eigen::VectorXd final_observation;
  /// Critic estimates V(s_t); empty until a critic fills them.
  std::vector<double> values;
  /// V(s_T) for truncated episodes; 0 when terminal or no critic.
  double bootstrap_value = 0.0;
  std::uint64_t params_fingerprint = 0;

  std::size_t size() const { return rewards.size(); }
  double total_reward() const;
};

struct AdvantageRecord {
  std::vector<double> returns;
  std::vector<double> advantages;
};

/// Runs a single episode (reset → terminal or max_episode_length steps).
Trajectory run_episode(EnvId env, const GaussianPolicy& policy, Rng& rng);

/// Runs whole episodes until at least `budget` transitions are collected; the
/// last episode may overshoot the budget by less than one episode length.
std::vector<Trajectory> collect(EnvId env, const GaussianPolicy& policy, std::size_t budget, Rng& rng);

std::size_t total_transitions(std::span<const Trajectory> trajectories);
double mean_episode_return(std::span<const Trajectory> trajectories);

/// R_t = r_t + γ R_{t+1}, seeded with 0 after a terminal step or with the
/// bootstrap value V(s_T) after a truncated one.
std::vector<double> discounted_returns(std::span<const double> rewards, double gamma, bool terminal, double bootstrap);

/// Generalized advantage estimation: A_t = Σ_l (γλ)^l δ_{t+l} with
/// δ_t = r_t + γ V(s_{t+1}) − V(s_t); returns R_t alongside.
AdvantageRecord gae_advantages(std::span<const double> rewards, std::span<const double> values, double gamma,
                               double lambda, bool terminal, double bootstrap);

/// Zero mean, unit variance in place (no-op for fewer than two entries).
void standardize(std::span<double> values);

/// One row per visited state: episode, step, obs_*, action_*, reward.
void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories);

}  // namespace svpg
