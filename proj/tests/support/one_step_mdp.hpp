#pragma once

// One-state, one-step MDP with reward r(a) (terminal after the first action),
// used to check likelihood-ratio estimators against exact gradients.

#include <cmath>
#include <functional>
#include <vector>

#include "svpg/estimators.hpp"
#include "svpg/rollout.hpp"

namespace mdp {

struct OneStep {
  svpg::GaussianPolicy policy;
  Eigen::VectorXd state;
};

inline OneStep make(std::uint64_t seed, double log_std) {
  svpg::Rng rng(seed);
  auto policy = svpg::GaussianPolicy::create(2, 1, std::vector<std::size_t>{4}, rng);
  auto p = policy.params();
  p.tail(1).setConstant(log_std);
  policy.set_params(p);
  return {policy, Eigen::Vector2d(0.4, -0.9)};
}

inline std::vector<svpg::Trajectory> episodes(const OneStep& m, std::size_t count, svpg::Rng& rng,
                                              const std::function<double(double)>& reward) {
  std::vector<svpg::Trajectory> out;
  out.reserve(count);
  for (std::size_t e = 0; e < count; ++e) {
    const auto sample = m.policy.sample_action(m.state, rng);
    svpg::Trajectory t;
    t.observations = m.state;
    t.actions = sample.action;
    t.rewards = {reward(sample.action[0])};
    t.log_probs = {sample.log_prob};
    t.terminal = true;
    t.final_observation = m.state;
    t.params_fingerprint = m.policy.fingerprint();
    out.push_back(std::move(t));
  }
  return out;
}

/// ∇θ J for r(a) = a: J = μ(s), so the mean-net block is ∇θ μ(s) and the
/// log σ block is 0.
inline Eigen::VectorXd linear_reward_gradient(const OneStep& m) {
  const auto& spec = m.policy.mean_net();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m.policy.params().size());
  g.head(static_cast<Eigen::Index>(spec.param_count())) =
      svpg::net_backward(spec, m.policy.net_params(), m.state, Eigen::VectorXd::Ones(1)).values;
  return g;
}

/// A critic whose output is the constant `value` everywhere.
inline svpg::CriticNet constant_critic(std::size_t obs_dim, double value) {
  svpg::Rng rng(0);
  auto c = svpg::CriticNet::create(obs_dim, std::vector<std::size_t>{4}, rng);
  c.params.setZero();
  c.params[c.params.size() - 1] = value;
  return c;
}

}  // namespace mdp
