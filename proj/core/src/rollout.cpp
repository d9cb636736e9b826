#include "svpg/rollout.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "svpg/errors.hpp"
#include "svpg/format.hpp"

namespace svpg {

namespace {

void check_discount(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("discount gamma must lie in [0, 1]");
}

}  // namespace

double Trajectory::total_reward() const { return std::accumulate(rewards.begin(), rewards.end(), 0.0); }

Trajectory run_episode(EnvId env, const GaussianPolicy& policy, Rng& rng) {
  const auto info = env_info(env);
  require_size(policy.obs_dim(), info.obs_dim, "policy observation size");
  require_size(policy.action_dim(), info.action_dim, "policy action size");

  NetEvaluator mean_net(policy.mean_net());
  const auto net_params = policy.net_params();
  const auto horizon = static_cast<Eigen::Index>(info.max_episode_length);

  Trajectory traj;
  traj.observations.resize(static_cast<Eigen::Index>(info.obs_dim), horizon);
  traj.actions.resize(static_cast<Eigen::Index>(info.action_dim), horizon);
  traj.rewards.reserve(info.max_episode_length);
  traj.log_probs.reserve(info.max_episode_length);
  traj.params_fingerprint = policy.fingerprint();

  EnvState state = env_reset(env, rng);
  Eigen::Index t = 0;
  for (; t < horizon; ++t) {
    const Eigen::VectorXd& mean = mean_net.forward(net_params, state.observation);
    ActionSample sample = policy.sample_from_mean(mean, rng);
    StepResult step = env_step(env, state, sample.action);
    traj.observations.col(t) = state.observation;
    traj.actions.col(t) = sample.action;
    traj.rewards.push_back(step.reward);
    traj.log_probs.push_back(sample.log_prob);
    state = std::move(step.next_state);
    if (step.terminal) {
      traj.terminal = true;
      ++t;
      break;
    }
  }
  traj.observations.conservativeResize(Eigen::NoChange, t);
  traj.actions.conservativeResize(Eigen::NoChange, t);
  traj.final_observation = std::move(state.observation);
  return traj;
}

std::vector<Trajectory> collect(EnvId env, const GaussianPolicy& policy, std::size_t budget, Rng& rng) {
  if (budget < 1) throw ConfigError("sample budget must be >= 1");
  std::vector<Trajectory> out;
  std::size_t transitions = 0;
  while (transitions < budget) {
    try {
      out.push_back(run_episode(env, policy, rng));
    } catch (const NumericalError& e) {
      throw NumericalError("episode " + std::to_string(out.size()) + ": " + e.what());
    } catch (const DimensionError& e) {
      throw DimensionError("episode " + std::to_string(out.size()) + ": " + e.what());
    } catch (const Error& e) {
      throw Error("episode " + std::to_string(out.size()) + ": " + e.what());
    }
    transitions += out.back().size();
  }
  return out;
}

std::size_t total_transitions(std::span<const Trajectory> trajectories) {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.size();
  return n;
}

double mean_episode_return(std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& t : trajectories) sum += t.total_reward();
  return sum / static_cast<double>(trajectories.size());
}

std::vector<double> discounted_returns(std::span<const double> rewards, double gamma, bool terminal,
                                       double bootstrap) {
  check_discount(gamma);
  std::vector<double> returns(rewards.size());
  double next = terminal ? 0.0 : bootstrap;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    if (!std::isfinite(rewards[t])) throw NumericalError("non-finite reward at step " + std::to_string(t));
    next = rewards[t] + gamma * next;
    returns[t] = next;
  }
  return returns;
}

AdvantageRecord gae_advantages(std::span<const double> rewards, std::span<const double> values, double gamma,
                               double lambda, bool terminal, double bootstrap) {
  check_discount(gamma);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("GAE lambda must lie in [0, 1]");
  require_size(values.size(), rewards.size(), "value estimates");

  AdvantageRecord rec;
  rec.returns = discounted_returns(rewards, gamma, terminal, bootstrap);
  rec.advantages.resize(rewards.size());
  const double tail_value = terminal ? 0.0 : bootstrap;
  if (lambda == 1.0) {
    // The λ=1 sum telescopes exactly to R_t − V(s_t).
    for (std::size_t t = 0; t < rewards.size(); ++t) rec.advantages[t] = rec.returns[t] - values[t];
    return rec;
  }
  double next_adv = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    const double next_value = t + 1 < rewards.size() ? values[t + 1] : tail_value;
    const double delta = rewards[t] + gamma * next_value - values[t];
    next_adv = delta + gamma * lambda * next_adv;
    rec.advantages[t] = next_adv;
  }
  return rec;
}

void standardize(std::span<double> values) {
  if (values.size() < 2) return;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double std = std::sqrt(var / n);
  for (double& v : values) v = (v - mean) / (std + 1e-8);
}

void write_trajectories_csv(std::ostream& out, std::span<const Trajectory> trajectories) {
  if (trajectories.empty()) return;
  const auto obs_dim = trajectories.front().observations.rows();
  const auto act_dim = trajectories.front().actions.rows();
  out << "episode,step";
  for (Eigen::Index k = 0; k < obs_dim; ++k) out << ",obs_" << k;
  for (Eigen::Index k = 0; k < act_dim; ++k) out << ",action_" << k;
  out << ",reward\n";
  for (std::size_t e = 0; e < trajectories.size(); ++e) {
    const auto& tr = trajectories[e];
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const auto col = static_cast<Eigen::Index>(t);
      out << e << ',' << t;
      for (Eigen::Index k = 0; k < obs_dim; ++k) out << ',' << format_double(tr.observations(k, col));
      for (Eigen::Index k = 0; k < act_dim; ++k) out << ',' << format_double(tr.actions(k, col));
      out << ',' << format_double(tr.rewards[t]) << '\n';
    }
  }
}

}  // namespace svpg
