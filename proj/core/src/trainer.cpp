#include "svpg/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "svpg/errors.hpp"
#include "svpg/logging.hpp"
#include "svpg/parallel.hpp"
#include "svpg/rollout.hpp"

namespace svpg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ParticleWork {
  Eigen::VectorXd gradient;
  ParticleRecord record;
};

ParticleWork likelihood_ratio_step(const TrainConfig& cfg, ParticleSet& ps, std::size_t p, std::size_t it) {
  const auto& est = cfg.estimator;
  const auto& policy = ps.policies[p];
  Rng rng = make_stream(ps.seeds[p], it, StreamPurpose::rollout);
  const auto trajs = collect(cfg.env, policy, cfg.particle_budget(), rng);

  ParticleWork w;
  switch (est.kind) {
    case EstimatorKind::reinforce:
      w.gradient = reinforce_gradient(trajs, policy, est.gamma, est.normalize_advantages).values;
      break;
    case EstimatorKind::reinforce_baseline: {
      std::vector<std::vector<double>> baseline;
      baseline.reserve(trajs.size());
      for (const auto& tr : trajs) baseline.push_back(critic_values(*ps.critics[p], tr));
      w.gradient = baseline_gradient(trajs, policy, baseline, est.gamma, est.normalize_advantages).values;
      break;
    }
    case EstimatorKind::a2c:
      w.gradient = a2c_gradient(trajs, policy, *ps.critics[p], est.gamma, est.lambda, est.normalize_advantages).values;
      break;
    case EstimatorKind::es:
      throw Error("internal: ES routed to likelihood-ratio step");
  }
  if (est.uses_critic()) {
    Rng critic_rng = make_stream(ps.seeds[p], it, StreamPurpose::critic);
    critic_fit(*ps.critics[p], trajs, est.gamma, est.lambda, est.critic_epochs, est.critic_minibatch, critic_rng);
  }
  w.record.transitions = total_transitions(trajs);
  w.record.episodes = trajs.size();
  w.record.train_return = mean_episode_return(trajs);
  return w;
}

ParticleWork es_step(const TrainConfig& cfg, ParticleSet& ps, std::size_t p, std::size_t it) {
  const auto& est = cfg.estimator;
  const auto& policy = ps.policies[p];
  const std::size_t evaluations = est.es_mode == EsMode::antithetic ? 2 * est.es_noise_count : est.es_noise_count;
  const std::size_t per_eval = std::max<std::size_t>(1, cfg.particle_budget() / evaluations);

  ParticleWork w;
  double return_sum = 0.0;
  std::size_t episode_count = 0;
  UtilityEvaluator utility = [&](const ParamVector& theta, std::size_t index) {
    GaussianPolicy perturbed(policy.mean_net(), theta, policy.particle());
    Rng rng = make_stream(ps.seeds[p], it, StreamPurpose::es_rollout, index);
    const auto trajs = collect(cfg.env, perturbed, per_eval, rng);
    w.record.transitions += total_transitions(trajs);
    for (const auto& tr : trajs) return_sum += tr.total_reward();
    episode_count += trajs.size();
    return mean_episode_return(trajs);
  };
  Rng noise = make_stream(ps.seeds[p], it, StreamPurpose::es_noise);
  w.gradient = es_gradient(utility, policy.params(), est.es_noise_count, est.es_step, noise, est.es_mode).values;
  w.record.episodes = episode_count;
  w.record.train_return = episode_count ? return_sum / static_cast<double>(episode_count) : 0.0;
  return w;
}

void clip_norm(Eigen::VectorXd& g, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = g.norm();
  if (norm > max_norm) g *= max_norm / norm;
}

}  // namespace

Regime parse_regime(std::string_view name) {
  if (name == "svpg") return Regime::svpg;
  if (name == "independent") return Regime::independent;
  if (name == "joint") return Regime::joint;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::svpg:
      return "svpg";
    case Regime::independent:
      return "independent";
    case Regime::joint:
      return "joint";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  if (n < 1) throw ConfigError("n must be >= 1");
  if (m < 1) throw ConfigError("m must be >= 1");
  if (iterations < 1) throw ConfigError("iterations must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (auto h : hidden) {
    if (h < 1) throw ConfigError("hidden layer sizes must be >= 1");
  }
  for (auto h : critic_hidden) {
    if (h < 1) throw ConfigError("critic hidden layer sizes must be >= 1");
  }
  estimator.validate();
  svpg.validate();
  policy_adam.validate();
  critic_adam.validate();
}

ParticleSet make_particles(const TrainConfig& config) {
  const auto info = env_info(config.env);
  ParticleSet ps;
  const std::size_t count = config.particle_count();
  for (std::size_t p = 0; p < count; ++p) {
    const auto seed = agent_seed(config.seed, p);
    Rng init = make_stream(seed, 0, StreamPurpose::init, 0);
    ps.policies.push_back(
        GaussianPolicy::create(info.obs_dim, info.action_dim, config.hidden, init, static_cast<int>(p)));
    ps.adam_states.push_back(AdamState::zeros(ps.policies.back().params().size(), config.policy_adam));
    if (config.estimator.uses_critic()) {
      Rng critic_init = make_stream(seed, 0, StreamPurpose::init, 1);
      ps.critics.emplace_back(CriticNet::create(info.obs_dim, config.critic_hidden, critic_init, config.critic_adam));
    } else {
      ps.critics.emplace_back(std::nullopt);
    }
    ps.seeds.push_back(seed);
  }
  return ps;
}

RunMetrics train(const TrainConfig& cfg, TrainObserver* observer, ParticleSet* final_particles) {
  cfg.validate();
  ParticleSet ps = make_particles(cfg);
  const std::size_t n = ps.size();
  const std::size_t budget = cfg.particle_budget();
  const std::size_t horizon = env_info(cfg.env).max_episode_length;
  std::vector<bool> warned_sigma(n, false);

  RunMetrics metrics;
  std::size_t cumulative_transitions = 0;
  std::size_t cumulative_episodes = 0;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    std::vector<ParticleWork> work(n);
    parallel_for(n, cfg.workers, [&](std::size_t p) {
      try {
        work[p] = cfg.estimator.kind == EstimatorKind::es ? es_step(cfg, ps, p, it) : likelihood_ratio_step(cfg, ps, p, it);
      } catch (const std::exception& e) {
        throw Error("iteration " + std::to_string(it + 1) + ", particle " + std::to_string(p) + ": " + e.what());
      }
    });

    IterationRecord rec;
    rec.iteration = it + 1;
    rec.particles.resize(n);
    std::vector<Eigen::VectorXd> grads(n);
    double grad_norm_sum = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      rec.particles[p] = work[p].record;
      rec.particles[p].grad_norm = work[p].gradient.norm();
      grad_norm_sum += rec.particles[p].grad_norm;
      rec.transitions += work[p].record.transitions;
      rec.episodes += work[p].record.episodes;
      if (cfg.estimator.kind != EstimatorKind::es &&
          (work[p].record.transitions < budget || work[p].record.transitions >= budget + horizon)) {
        warn("particle " + std::to_string(p) + " consumed " + std::to_string(work[p].record.transitions) +
             " transitions for a budget of " + std::to_string(budget));
      }
      grads[p] = std::move(work[p].gradient);
      clip_norm(grads[p], cfg.svpg.max_grad_norm);
    }
    rec.mean_grad_norm = grad_norm_sum / static_cast<double>(n);

    std::vector<Eigen::VectorXd> directions;
    if (cfg.regime == Regime::svpg) {
      rec.alpha = anneal_alpha(cfg.svpg, it);
      std::vector<ParamVector> thetas;
      thetas.reserve(n);
      for (const auto& pol : ps.policies) thetas.push_back(pol.params());
      const double h = cfg.svpg.kernel == KernelMode::rbf ? median_bandwidth(thetas) : 1.0;
      auto stein = svpg_direction(thetas, grads, {}, rec.alpha, h, cfg.svpg.kernel);
      rec.bandwidth = stein.bandwidth;
      rec.mean_offdiag_gram = stein.mean_offdiag_gram;
      rec.repulsion_ratio = stein.repulsion_ratio;
      directions = std::move(stein.directions);
    } else {
      rec.alpha = rec.bandwidth = rec.mean_offdiag_gram = rec.repulsion_ratio = kNaN;
      directions = std::move(grads);
    }

    for (std::size_t p = 0; p < n; ++p) {
      adam_step(ps.adam_states[p], ps.policies[p].mutable_params(), directions[p], StepDirection::ascent,
                static_cast<int>(p));
      if (!warned_sigma[p] && ps.policies[p].has_small_sigma()) {
        warn("particle " + std::to_string(p) + " has an action std below " + std::to_string(kSmallSigma));
        warned_sigma[p] = true;
      }
    }

    if (cfg.eval_budget > 0) {
      parallel_for(n, cfg.workers, [&](std::size_t p) {
        Rng rng = make_stream(ps.seeds[p], it, StreamPurpose::evaluation);
        rec.particles[p].eval_return = evaluate(ps.policies[p], cfg.env, cfg.eval_budget, rng);
      });
    } else {
      for (auto& pr : rec.particles) pr.eval_return = pr.train_return;
    }

    std::vector<double> evals(n), trains(n);
    for (std::size_t p = 0; p < n; ++p) {
      evals[p] = rec.particles[p].eval_return;
      trains[p] = rec.particles[p].train_return;
    }
    rec.best_particle = select_best(evals);
    rec.best_eval_return = evals[rec.best_particle];
    rec.mean_eval_return = std::accumulate(evals.begin(), evals.end(), 0.0) / static_cast<double>(n);
    rec.best_train_return = *std::max_element(trains.begin(), trains.end());
    rec.mean_train_return = std::accumulate(trains.begin(), trains.end(), 0.0) / static_cast<double>(n);

    cumulative_transitions += rec.transitions;
    cumulative_episodes += rec.episodes;
    rec.cumulative_transitions = cumulative_transitions;
    rec.cumulative_episodes = cumulative_episodes;
    metrics.iterations.push_back(std::move(rec));
    if (observer) observer->on_iteration(metrics.iterations.back(), ps);
  }

  auto& s = metrics.summary;
  s.final_returns.resize(n);
  if (cfg.final_eval_budget > 0) {
    parallel_for(n, cfg.workers, [&](std::size_t p) {
      Rng rng = make_stream(ps.seeds[p], cfg.iterations, StreamPurpose::final_evaluation);
      s.final_returns[p] = evaluate(ps.policies[p], cfg.env, cfg.final_eval_budget, rng);
    });
  } else {
    for (std::size_t p = 0; p < n; ++p) s.final_returns[p] = metrics.iterations.back().particles[p].eval_return;
  }
  s.best_particle = select_best(s.final_returns);
  s.best_return = s.final_returns[s.best_particle];
  s.mean_final_return = std::accumulate(s.final_returns.begin(), s.final_returns.end(), 0.0) / static_cast<double>(n);
  s.episodes_to_95 = episodes_to_threshold(metrics, 0.95);
  s.max_eval_return = -std::numeric_limits<double>::infinity();
  for (const auto& r : metrics.iterations) s.max_eval_return = std::max(s.max_eval_return, r.best_eval_return);
  s.total_transitions = cumulative_transitions;
  s.total_episodes = cumulative_episodes;

  if (observer) observer->on_finish(metrics, ps);
  if (final_particles) *final_particles = std::move(ps);
  return metrics;
}

RunMetrics train_svpg(TrainConfig config, TrainObserver* observer, ParticleSet* final_particles) {
  config.regime = Regime::svpg;
  return train(config, observer, final_particles);
}

RunMetrics train_independent(TrainConfig config, TrainObserver* observer, ParticleSet* final_particles) {
  config.regime = Regime::independent;
  return train(config, observer, final_particles);
}

RunMetrics train_joint(TrainConfig config, TrainObserver* observer, ParticleSet* final_particles) {
  config.regime = Regime::joint;
  return train(config, observer, final_particles);
}

double evaluate(const GaussianPolicy& policy, EnvId env, std::size_t budget, Rng& rng) {
  if (budget < 1) throw ConfigError("evaluation budget must be >= 1");
  return mean_episode_return(collect(env, policy, budget, rng));
}

double evaluate(const GaussianPolicy& policy, EnvId env, std::size_t budget, std::uint64_t seed) {
  Rng rng = make_stream(seed, 0, StreamPurpose::evaluation);
  return evaluate(policy, env, budget, rng);
}

std::size_t select_best(std::span<const double> evaluations) {
  if (evaluations.empty()) throw Error("select_best needs at least one evaluation");
  std::size_t best = 0;
  for (std::size_t i = 1; i < evaluations.size(); ++i) {
    if (evaluations[i] > evaluations[best]) best = i;
  }
  return best;
}

std::optional<std::size_t> episodes_to_threshold(std::span<const double> best_returns,
                                                 std::span<const std::size_t> cumulative_episodes, double fraction) {
  if (best_returns.empty()) throw Error("episodes_to_threshold needs a non-empty run");
  require_size(cumulative_episodes.size(), best_returns.size(), "cumulative episode counts");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("fraction must lie in (0, 1]");
  const double max = *std::max_element(best_returns.begin(), best_returns.end());
  const double threshold = max - (1.0 - fraction) * std::abs(max);
  for (std::size_t i = 0; i < best_returns.size(); ++i) {
    if (best_returns[i] >= threshold) return cumulative_episodes[i];
  }
  return std::nullopt;
}

std::optional<std::size_t> episodes_to_threshold(const RunMetrics& metrics, double fraction) {
  std::vector<double> best;
  std::vector<std::size_t> episodes;
  for (const auto& r : metrics.iterations) {
    best.push_back(r.best_eval_return);
    episodes.push_back(r.cumulative_episodes);
  }
  return episodes_to_threshold(best, episodes, fraction);
}

}  // namespace svpg
