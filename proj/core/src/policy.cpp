#include "svpg/policy.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "svpg/errors.hpp"
#include "svpg/logging.hpp"

namespace svpg {

namespace {

const double kHalfLogTwoPi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

GaussianPolicy::GaussianPolicy(NetSpec mean_net, ParamVector params, int particle)
    : mean_net_(std::move(mean_net)), params_(std::move(params)), particle_(particle) {
  mean_net_.validate();
  require_size(static_cast<std::size_t>(params_.size()), mean_net_.param_count() + mean_net_.output_size(),
               "policy parameters");
}

GaussianPolicy GaussianPolicy::create(std::size_t obs_dim, std::size_t action_dim,
                                      std::span<const std::size_t> hidden, Rng& rng, int particle) {
  NetSpec spec = NetSpec::mlp(obs_dim, hidden, action_dim);
  ParamVector params(static_cast<Eigen::Index>(spec.param_count() + action_dim));
  params.head(static_cast<Eigen::Index>(spec.param_count())) = init_params(spec, rng);
  params.tail(static_cast<Eigen::Index>(action_dim)).setZero();
  return GaussianPolicy(std::move(spec), std::move(params), particle);
}

GaussianPolicy GaussianPolicy::from_checkpoint(const ParamCheckpoint& checkpoint, int particle) {
  require_size(checkpoint.extra_size, checkpoint.spec.output_size(), "policy checkpoint log-std block");
  return GaussianPolicy(checkpoint.spec, checkpoint.params, particle);
}

ParamCheckpoint GaussianPolicy::checkpoint() const { return {mean_net_, action_dim(), params_}; }

void GaussianPolicy::set_params(ParamVector params) {
  require_size(static_cast<std::size_t>(params.size()), static_cast<std::size_t>(params_.size()), "policy parameters");
  params_ = std::move(params);
}

Eigen::VectorXd GaussianPolicy::mean(const Eigen::Ref<const Eigen::VectorXd>& obs) const {
  return net_forward(mean_net_, net_params(), obs);
}

void GaussianPolicy::check_sigma() const { require_finite(log_std(), "policy log-std", particle_); }

ActionSample GaussianPolicy::sample_action(const Eigen::Ref<const Eigen::VectorXd>& obs, Rng& rng) const {
  return sample_from_mean(mean(obs), rng);
}

ActionSample GaussianPolicy::sample_from_mean(const Eigen::Ref<const Eigen::VectorXd>& mean, Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(static_cast<Eigen::Index>(action_dim()));
  for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = normal(rng);
  require_finite(mean, "policy mean", particle_);
  check_sigma();
  ActionSample s;
  s.action = mean + (log_std().array().exp() * z.array()).matrix();
  s.log_prob = log_prob_from_mean(mean, s.action);
  return s;
}

ActionSample GaussianPolicy::sample_action_with_noise(const Eigen::Ref<const Eigen::VectorXd>& obs,
                                                      const Eigen::Ref<const Eigen::VectorXd>& z) const {
  require_size(static_cast<std::size_t>(z.size()), action_dim(), "policy noise");
  const Eigen::VectorXd mu = mean(obs);
  require_finite(mu, "policy mean", particle_);
  check_sigma();
  ActionSample s;
  s.action = mu + (log_std().array().exp() * z.array()).matrix();
  s.log_prob = log_prob_from_mean(mu, s.action);
  return s;
}

double GaussianPolicy::log_prob(const Eigen::Ref<const Eigen::VectorXd>& obs,
                                const Eigen::Ref<const Eigen::VectorXd>& action) const {
  return log_prob_from_mean(mean(obs), action);
}

double GaussianPolicy::log_prob_from_mean(const Eigen::Ref<const Eigen::VectorXd>& mean,
                                          const Eigen::Ref<const Eigen::VectorXd>& action) const {
  require_size(static_cast<std::size_t>(action.size()), action_dim(), "action");
  double lp = 0.0;
  const auto ls = log_std();
  for (Eigen::Index k = 0; k < action.size(); ++k) {
    const double z = (action[k] - mean[k]) / std::exp(ls[k]);
    lp += -0.5 * z * z - ls[k] - kHalfLogTwoPi;
  }
  return lp;
}

GradientEstimate GaussianPolicy::log_prob_grad(const Eigen::Ref<const Eigen::VectorXd>& obs,
                                               const Eigen::Ref<const Eigen::VectorXd>& action) const {
  require_size(static_cast<std::size_t>(action.size()), action_dim(), "action");
  return {weighted_score(obs, action, Eigen::VectorXd::Ones(1)), 1};
}

Eigen::VectorXd GaussianPolicy::weighted_score(const Eigen::Ref<const Eigen::MatrixXd>& obs,
                                               const Eigen::Ref<const Eigen::MatrixXd>& actions,
                                               const Eigen::Ref<const Eigen::VectorXd>& weights) const {
  require_size(static_cast<std::size_t>(actions.rows()), action_dim(), "action batch rows");
  require_size(static_cast<std::size_t>(actions.cols()), static_cast<std::size_t>(obs.cols()), "action batch size");
  require_size(static_cast<std::size_t>(weights.size()), static_cast<std::size_t>(obs.cols()), "score weights");
  check_sigma();

  ForwardCache cache;
  const Eigen::MatrixXd means = net_forward_batch(mean_net_, net_params(), obs, &cache);
  const Eigen::ArrayXd inv_var = (-2.0 * log_std().array()).exp();
  const Eigen::ArrayXd inv_sigma = (-log_std().array()).exp();

  // d/dμ log π = (a − μ)/σ², d/dlogσ log π = ((a − μ)/σ)² − 1
  const Eigen::ArrayXXd diff = actions.array() - means.array();
  Eigen::MatrixXd cotangent = (diff.colwise() * inv_var).matrix() * weights.asDiagonal();
  const Eigen::ArrayXXd z = diff.colwise() * inv_sigma;

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
  net_backward_batch(mean_net_, net_params(), cache, cotangent,
                     grad.head(static_cast<Eigen::Index>(mean_net_.param_count())));
  grad.tail(static_cast<Eigen::Index>(action_dim())) = ((z.square() - 1.0).matrix() * weights);
  return grad;
}

std::uint64_t GaussianPolicy::fingerprint() const {
  std::uint64_t h = 0x243F6A8885A308D3ULL;
  for (Eigen::Index k = 0; k < params_.size(); ++k) {
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(params_[k]));
  }
  return h;
}

bool GaussianPolicy::has_small_sigma() const { return (log_std().array().exp() < kSmallSigma).any(); }

}  // namespace svpg
