#include "svpg/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "svpg/errors.hpp"

namespace svpg {

namespace {

void check_fresh(std::span<const Trajectory> trajectories, const GaussianPolicy& policy) {
  const auto fp = policy.fingerprint();
  for (std::size_t e = 0; e < trajectories.size(); ++e) {
    if (trajectories[e].params_fingerprint != fp) {
      throw Error("stale log-prob cache: episode " + std::to_string(e) +
                  " was collected under different policy parameters" + particle_label(policy.particle()));
    }
  }
}

Eigen::MatrixXd stack_observations(std::span<const Trajectory> trajectories, std::size_t total) {
  const auto rows = trajectories.front().observations.rows();
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(total));
  Eigen::Index col = 0;
  for (const auto& tr : trajectories) {
    out.middleCols(col, tr.observations.cols()) = tr.observations;
    col += tr.observations.cols();
  }
  return out;
}

Eigen::MatrixXd stack_actions(std::span<const Trajectory> trajectories, std::size_t total) {
  const auto rows = trajectories.front().actions.rows();
  Eigen::MatrixXd out(rows, static_cast<Eigen::Index>(total));
  Eigen::Index col = 0;
  for (const auto& tr : trajectories) {
    out.middleCols(col, tr.actions.cols()) = tr.actions;
    col += tr.actions.cols();
  }
  return out;
}

double bootstrap_for(const CriticNet& critic, const Trajectory& tr) {
  return tr.terminal ? 0.0 : critic.value(tr.final_observation);
}

}  // namespace

EstimatorKind parse_estimator_kind(std::string_view name) {
  if (name == "es") return EstimatorKind::es;
  if (name == "reinforce") return EstimatorKind::reinforce;
  if (name == "reinforce_baseline") return EstimatorKind::reinforce_baseline;
  if (name == "a2c") return EstimatorKind::a2c;
  throw ConfigError("unknown estimator '" + std::string(name) + "'");
}

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::es:
      return "es";
    case EstimatorKind::reinforce:
      return "reinforce";
    case EstimatorKind::reinforce_baseline:
      return "reinforce_baseline";
    case EstimatorKind::a2c:
      return "a2c";
  }
  return "unknown";
}

void EstimatorConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  if (kind == EstimatorKind::es) {
    if (es_noise_count < 1) throw ConfigError("es_noise_count must be >= 1");
    if (!(es_step > 0.0)) throw ConfigError("es_step must be positive");
  }
  if (uses_critic()) {
    if (critic_minibatch < 1) throw ConfigError("critic_minibatch must be >= 1");
  }
}

CriticNet CriticNet::create(std::size_t obs_dim, std::span<const std::size_t> hidden, Rng& rng,
                            const AdamConfig& adam) {
  CriticNet c;
  c.spec = NetSpec::mlp(obs_dim, hidden, 1);
  c.params = init_params(c.spec, rng);
  c.adam = AdamState::zeros(c.params.size(), adam);
  return c;
}

double CriticNet::value(const Eigen::Ref<const Eigen::VectorXd>& obs) const {
  return net_forward(spec, params, obs)[0];
}

Eigen::VectorXd CriticNet::values(const Eigen::Ref<const Eigen::MatrixXd>& obs) const {
  return net_forward_batch(spec, params, obs).row(0).transpose();
}

GradientEstimate es_gradient(const UtilityEvaluator& utility, const ParamVector& theta, std::size_t m, double h,
                             Rng& rng, EsMode mode) {
  if (m < 1) throw ConfigError("ES needs at least one perturbation");
  if (!(h > 0.0)) throw ConfigError("ES step h must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  GradientEstimate g{Eigen::VectorXd::Zero(theta.size()), 0};
  Eigen::VectorXd xi(theta.size());

  auto eval = [&](const ParamVector& p, std::size_t index) {
    double j = 0.0;
    try {
      j = utility(p, index);
    } catch (const std::exception& e) {
      throw Error("ES utility evaluation failed at perturbation " + std::to_string(index) + ": " + e.what());
    }
    if (!std::isfinite(j)) throw NumericalError("non-finite ES utility at perturbation " + std::to_string(index));
    ++g.sample_count;
    return j;
  };

  for (std::size_t i = 0; i < m; ++i) {
    for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = normal(rng);
    if (mode == EsMode::antithetic) {
      const double plus = eval(theta + h * xi, 2 * i);
      const double minus = eval(theta - h * xi, 2 * i + 1);
      g.values += ((plus - minus) / (2.0 * h)) * xi;
    } else {
      const double j = eval(theta + h * xi, i);
      g.values += (j / h) * xi;
    }
  }
  g.values /= static_cast<double>(m);
  return g;
}

GradientEstimate score_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                std::span<const std::vector<double>> coefficients, bool normalize) {
  if (trajectories.empty()) throw Error("policy gradient needs at least one trajectory");
  require_size(coefficients.size(), trajectories.size(), "coefficient lists");
  check_fresh(trajectories, policy);

  const std::size_t total = total_transitions(trajectories);
  Eigen::VectorXd weights(static_cast<Eigen::Index>(total));
  Eigen::Index col = 0;
  for (std::size_t e = 0; e < trajectories.size(); ++e) {
    require_size(coefficients[e].size(), trajectories[e].size(), "per-step coefficients");
    for (double c : coefficients[e]) weights[col++] = c;
  }
  if (normalize) standardize(std::span<double>(weights.data(), total));
  require_finite(weights, "policy-gradient coefficients", policy.particle());

  GradientEstimate g;
  g.values = policy.weighted_score(stack_observations(trajectories, total), stack_actions(trajectories, total), weights);
  g.values /= static_cast<double>(trajectories.size());
  g.sample_count = total;
  return g;
}

GradientEstimate reinforce_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                    double gamma, bool normalize) {
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(trajectories.size());
  for (const auto& tr : trajectories) coeffs.push_back(discounted_returns(tr.rewards, gamma, tr.terminal, 0.0));
  return score_gradient(trajectories, policy, coeffs, normalize);
}

GradientEstimate baseline_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                   std::span<const std::vector<double>> baseline_values, double gamma,
                                   bool normalize) {
  require_size(baseline_values.size(), trajectories.size(), "baseline lists");
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(trajectories.size());
  for (std::size_t e = 0; e < trajectories.size(); ++e) {
    const auto& tr = trajectories[e];
    require_size(baseline_values[e].size(), tr.size(), "baseline values");
    auto r = discounted_returns(tr.rewards, gamma, tr.terminal, 0.0);
    for (std::size_t t = 0; t < r.size(); ++t) r[t] -= baseline_values[e][t];
    coeffs.push_back(std::move(r));
  }
  return score_gradient(trajectories, policy, coeffs, normalize);
}

std::vector<double> critic_values(const CriticNet& critic, const Trajectory& trajectory) {
  if (trajectory.size() == 0) return {};
  const Eigen::VectorXd v = critic.values(trajectory.observations);
  return {v.data(), v.data() + v.size()};
}

GradientEstimate a2c_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                              const CriticNet& critic, double gamma, double lambda, bool normalize) {
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(trajectories.size());
  for (const auto& tr : trajectories) {
    const auto values = critic_values(critic, tr);
    auto rec = gae_advantages(tr.rewards, values, gamma, lambda, tr.terminal, bootstrap_for(critic, tr));
    coeffs.push_back(std::move(rec.advantages));
  }
  return score_gradient(trajectories, policy, coeffs, normalize);
}

CriticFitReport critic_fit(CriticNet& critic, std::span<const Trajectory> trajectories, double gamma, double lambda,
                           std::size_t epochs, std::size_t minibatch, Rng& rng) {
  if (trajectories.empty()) throw Error("critic_fit needs at least one trajectory");
  if (minibatch < 1) throw ConfigError("critic minibatch must be >= 1");
  const std::size_t total = total_transitions(trajectories);
  if (total == 0) throw Error("critic_fit needs at least one transition");

  Eigen::VectorXd targets(static_cast<Eigen::Index>(total));
  double initial_sq = 0.0;
  Eigen::Index col = 0;
  for (const auto& tr : trajectories) {
    const auto values = critic_values(critic, tr);
    auto rec = gae_advantages(tr.rewards, values, gamma, lambda, tr.terminal, bootstrap_for(critic, tr));
    for (std::size_t t = 0; t < tr.size(); ++t) {
      const double target = lambda == 1.0 ? rec.returns[t] : rec.advantages[t] + values[t];
      initial_sq += (values[t] - target) * (values[t] - target);
      targets[col++] = target;
    }
  }
  const Eigen::MatrixXd obs = stack_observations(trajectories, total);

  auto check_loss = [](double loss) {
    if (!std::isfinite(loss)) throw NumericalError("non-finite critic loss");
    return loss;
  };

  CriticFitReport report;
  report.initial_loss = check_loss(initial_sq / static_cast<double>(total));
  std::vector<Eigen::Index> order(total);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd grad(critic.params.size());
  ForwardCache cache;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_sq = 0.0;
    for (std::size_t start = 0; start < total; start += minibatch) {
      const std::size_t count = std::min(minibatch, total - start);
      Eigen::MatrixXd batch(obs.rows(), static_cast<Eigen::Index>(count));
      Eigen::VectorXd batch_targets(static_cast<Eigen::Index>(count));
      for (std::size_t b = 0; b < count; ++b) {
        batch.col(static_cast<Eigen::Index>(b)) = obs.col(order[start + b]);
        batch_targets[static_cast<Eigen::Index>(b)] = targets[order[start + b]];
      }
      const Eigen::MatrixXd pred = net_forward_batch(critic.spec, critic.params, batch, &cache);
      const Eigen::VectorXd residual = pred.row(0).transpose() - batch_targets;
      epoch_sq += residual.squaredNorm();
      // d/dV of mean (V − y)^2
      const Eigen::MatrixXd cot = (2.0 / static_cast<double>(count)) * residual.transpose();
      grad.setZero();
      net_backward_batch(critic.spec, critic.params, cache, cot, grad);
      adam_step(critic.adam, critic.params, grad, StepDirection::descent);
      ++report.steps;
    }
    // Mean minibatch loss seen during the epoch (before each update).
    report.epoch_losses.push_back(check_loss(epoch_sq / static_cast<double>(total)));
  }
  if (epochs > 0) {
    report.final_loss = check_loss((critic.values(obs) - targets).squaredNorm() / static_cast<double>(total));
  } else {
    report.final_loss = report.initial_loss;
  }
  return report;
}

}  // namespace svpg
