#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "svpg/net.hpp"
#include "svpg/rng.hpp"
#include "svpg/serialize.hpp"
#include "svpg/types.hpp"

namespace svpg {

inline constexpr std::size_t kDefaultHidden[] = {100, 50, 25};

/// Below this σ a diagnostic warning is emitted; σ is never floored.
inline constexpr double kSmallSigma = 1e-4;

struct ActionSample {
  Eigen::VectorXd action;
  double log_prob = 0.0;
};

/// Diagonal Gaussian policy: the mean comes from an MLP, log σ is a
/// state-independent vector stored in the last action_dim entries of params.
class GaussianPolicy {
 public:
  GaussianPolicy(NetSpec mean_net, ParamVector params, int particle = -1);

  /// Glorot-initialized mean net, log σ = 0.
  static GaussianPolicy create(std::size_t obs_dim, std::size_t action_dim, std::span<const std::size_t> hidden,
                               Rng& rng, int particle = -1);
  static GaussianPolicy from_checkpoint(const ParamCheckpoint& checkpoint, int particle = -1);
  ParamCheckpoint checkpoint() const;

  const NetSpec& mean_net() const { return mean_net_; }
  std::size_t obs_dim() const { return mean_net_.input_size(); }
  std::size_t action_dim() const { return mean_net_.output_size(); }
  int particle() const { return particle_; }

  const ParamVector& params() const { return params_; }
  ParamVector& mutable_params() { return params_; }
  void set_params(ParamVector params);

  auto net_params() const { return params_.head(static_cast<Eigen::Index>(mean_net_.param_count())); }
  auto log_std() const { return params_.tail(static_cast<Eigen::Index>(action_dim())); }

  Eigen::VectorXd mean(const Eigen::Ref<const Eigen::VectorXd>& obs) const;

  ActionSample sample_action(const Eigen::Ref<const Eigen::VectorXd>& obs, Rng& rng) const;
  /// action = mean + σ ⊙ z for a given standard-normal draw z.
  ActionSample sample_action_with_noise(const Eigen::Ref<const Eigen::VectorXd>& obs,
                                        const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// Same as sample_action with the mean already computed (rollout hot path).
  ActionSample sample_from_mean(const Eigen::Ref<const Eigen::VectorXd>& mean, Rng& rng) const;

  double log_prob(const Eigen::Ref<const Eigen::VectorXd>& obs, const Eigen::Ref<const Eigen::VectorXd>& action) const;
  double log_prob_from_mean(const Eigen::Ref<const Eigen::VectorXd>& mean,
                            const Eigen::Ref<const Eigen::VectorXd>& action) const;

  /// ∇θ log π(action | obs; θ), including the log σ block.
  GradientEstimate log_prob_grad(const Eigen::Ref<const Eigen::VectorXd>& obs,
                                 const Eigen::Ref<const Eigen::VectorXd>& action) const;

  /// Σ_t w_t ∇θ log π(a_t | s_t; θ) over the columns of `obs`/`actions`,
  /// computed with one batched backward pass.
  Eigen::VectorXd weighted_score(const Eigen::Ref<const Eigen::MatrixXd>& obs,
                                 const Eigen::Ref<const Eigen::MatrixXd>& actions,
                                 const Eigen::Ref<const Eigen::VectorXd>& weights) const;

  /// Hash of the parameter bits; used to detect stale trajectory caches.
  std::uint64_t fingerprint() const;

  bool has_small_sigma() const;

 private:
  void check_sigma() const;

  NetSpec mean_net_;
  ParamVector params_;
  int particle_ = -1;
};

}  // namespace svpg
