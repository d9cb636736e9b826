#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "svpg/adam.hpp"
#include "svpg/envs.hpp"
#include "svpg/estimators.hpp"
#include "svpg/policy.hpp"
#include "svpg/svgd.hpp"

namespace svpg {

/// svpg: n particles coupled by the Stein update. independent: n uncoupled
/// learners with m transitions each. joint: one learner with n·m transitions.
enum class Regime { svpg, independent, joint };

Regime parse_regime(std::string_view name);
std::string_view regime_name(Regime regime);

struct TrainConfig {
  EnvId env = EnvId::cartpole;
  Regime regime = Regime::svpg;
  EstimatorConfig estimator;
  SvpgConfig svpg;
  std::size_t n = 16;
  /// Transitions per particle per iteration (joint uses n·m for its one agent).
  std::size_t m = 10000;
  std::size_t iterations = 1000;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden{100, 50, 25};
  std::vector<std::size_t> critic_hidden{100, 50, 25};
  AdamConfig policy_adam;
  AdamConfig critic_adam;
  /// Per-iteration evaluation budget per particle; 0 reuses the training returns.
  std::size_t eval_budget = 5000;
  /// Budget of the final evaluation of every particle; 0 reuses the last
  /// per-iteration evaluation.
  std::size_t final_eval_budget = 50000;
  /// Rollout fan-out cap. Results do not depend on it.
  std::size_t workers = 1;

  void validate() const;
  /// Number of particles actually trained (1 for joint).
  std::size_t particle_count() const { return regime == Regime::joint ? 1 : n; }
  /// Transitions per particle per iteration.
  std::size_t particle_budget() const { return regime == Regime::joint ? n * m : m; }
};

/// n policies with their optimizer state, critics and seeds.
struct ParticleSet {
  std::vector<GaussianPolicy> policies;
  std::vector<std::optional<CriticNet>> critics;
  std::vector<AdamState> adam_states;
  std::vector<std::uint64_t> seeds;

  std::size_t size() const { return policies.size(); }
};

ParticleSet make_particles(const TrainConfig& config);

struct ParticleRecord {
  std::size_t transitions = 0;
  std::size_t episodes = 0;
  double train_return = 0.0;
  double eval_return = 0.0;
  double grad_norm = 0.0;
};

/// One row of metrics.csv. Kernel diagnostics are NaN outside the svpg regime.
struct IterationRecord {
  std::size_t iteration = 0;  // 1-based
  std::size_t transitions = 0;
  std::size_t episodes = 0;
  std::size_t cumulative_transitions = 0;
  std::size_t cumulative_episodes = 0;
  double alpha = 0.0;
  double bandwidth = 0.0;
  double mean_offdiag_gram = 0.0;
  double repulsion_ratio = 0.0;
  double mean_grad_norm = 0.0;
  double mean_train_return = 0.0;
  double best_train_return = 0.0;
  double mean_eval_return = 0.0;
  double best_eval_return = 0.0;
  std::size_t best_particle = 0;
  std::vector<ParticleRecord> particles;
};

struct RunSummary {
  double best_return = 0.0;
  std::size_t best_particle = 0;
  double mean_final_return = 0.0;
  std::vector<double> final_returns;
  std::optional<std::size_t> episodes_to_95;
  double max_eval_return = 0.0;
  std::size_t total_transitions = 0;
  std::size_t total_episodes = 0;
};

struct RunMetrics {
  std::vector<IterationRecord> iterations;
  RunSummary summary;
};

/// Hooks called by the training loop (CSV streaming, checkpoints).
class TrainObserver {
 public:
  virtual ~TrainObserver() = default;
  virtual void on_iteration(const IterationRecord& record, const ParticleSet& particles) = 0;
  virtual void on_finish(const RunMetrics&, const ParticleSet&) {}
};

RunMetrics train(const TrainConfig& config, TrainObserver* observer = nullptr, ParticleSet* final_particles = nullptr);

/// Regime-specific entry points; they override config.regime.
RunMetrics train_svpg(TrainConfig config, TrainObserver* observer = nullptr, ParticleSet* final_particles = nullptr);
RunMetrics train_independent(TrainConfig config, TrainObserver* observer = nullptr,
                             ParticleSet* final_particles = nullptr);
RunMetrics train_joint(TrainConfig config, TrainObserver* observer = nullptr, ParticleSet* final_particles = nullptr);

/// Mean undiscounted return of whole episodes run until `budget` transitions.
double evaluate(const GaussianPolicy& policy, EnvId env, std::size_t budget, Rng& rng);
double evaluate(const GaussianPolicy& policy, EnvId env, std::size_t budget, std::uint64_t seed);

/// argmax with ties broken by the lowest index.
std::size_t select_best(std::span<const double> evaluations);

/// Cumulative training episodes at the first iteration whose best evaluated
/// return reaches `fraction` of the run maximum. "Reaching" means within
/// (1 − fraction)·|max| of the max, which equals fraction·max for positive
/// maxima and stays meaningful for negative ones.
std::optional<std::size_t> episodes_to_threshold(std::span<const double> best_returns,
                                                 std::span<const std::size_t> cumulative_episodes, double fraction);
std::optional<std::size_t> episodes_to_threshold(const RunMetrics& metrics, double fraction);

}  // namespace svpg
