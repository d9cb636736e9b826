#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "svpg/adam.hpp"
#include "svpg/net.hpp"
#include "svpg/policy.hpp"
#include "svpg/rng.hpp"
#include "svpg/rollout.hpp"
#include "svpg/types.hpp"

namespace svpg {

enum class EstimatorKind { es, reinforce, reinforce_baseline, a2c };

EstimatorKind parse_estimator_kind(std::string_view name);
std::string_view estimator_name(EstimatorKind kind);

/// `antithetic` uses the symmetric difference J(θ+hξ) − J(θ−hξ); `forward`
/// is the one-sided form (1/m) Σ J(θ+hξ) ξ / h.
enum class EsMode { antithetic, forward };

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::a2c;
  std::size_t es_noise_count = 8;
  double es_step = 0.02;
  EsMode es_mode = EsMode::antithetic;
  double gamma = 0.99;
  double lambda = 1.0;
  /// Standardize the per-step coefficients (returns or advantages) over each
  /// gradient batch.
  bool normalize_advantages = true;
  std::size_t critic_epochs = 3;
  std::size_t critic_minibatch = 256;

  bool uses_critic() const { return kind == EstimatorKind::reinforce_baseline || kind == EstimatorKind::a2c; }
  void validate() const;
};

/// State-value network V(s): obs_dim → hidden (tanh) → 1.
struct CriticNet {
  NetSpec spec;
  ParamVector params;
  AdamState adam;

  static CriticNet create(std::size_t obs_dim, std::span<const std::size_t> hidden, Rng& rng,
                          const AdamConfig& adam = {});

  double value(const Eigen::Ref<const Eigen::VectorXd>& obs) const;
  Eigen::VectorXd values(const Eigen::Ref<const Eigen::MatrixXd>& obs) const;
};

/// Estimated utility J at a perturbed parameter vector; the second argument is
/// the evaluation index (for per-evaluation random streams).
using UtilityEvaluator = std::function<double(const ParamVector&, std::size_t)>;

/// Gaussian-smoothing finite-difference gradient with m noise draws ξ_i ~ N(0, I).
GradientEstimate es_gradient(const UtilityEvaluator& utility, const ParamVector& theta, std::size_t m, double h,
                             Rng& rng, EsMode mode = EsMode::antithetic);

/// Episode-averaged Σ_t ∇θ log π(a_t|s_t) c_t for arbitrary per-step
/// coefficients c_t. All likelihood-ratio estimators funnel through this.
GradientEstimate score_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                std::span<const std::vector<double>> coefficients, bool normalize);

/// REINFORCE: coefficients R_t (truncated episodes bootstrap with 0).
GradientEstimate reinforce_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                    double gamma, bool normalize = false);

/// Baseline variant: coefficients R_t − b(s_t).
GradientEstimate baseline_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                                   std::span<const std::vector<double>> baseline_values, double gamma,
                                   bool normalize = false);

/// Advantage actor-critic: coefficients are GAE(γ, λ) advantages under the
/// critic; truncated episodes bootstrap with V(s_T).
GradientEstimate a2c_gradient(std::span<const Trajectory> trajectories, const GaussianPolicy& policy,
                              const CriticNet& critic, double gamma, double lambda, bool normalize = false);

/// Critic estimates V(s_t) for every visited state of one trajectory.
std::vector<double> critic_values(const CriticNet& critic, const Trajectory& trajectory);

struct CriticFitReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  std::vector<double> epoch_losses;
  std::size_t steps = 0;
};

/// Regresses V(s_t) onto the empirical targets (R_t for λ = 1, A_t + V(s_t)
/// otherwise) with Adam on the mean squared error. Each epoch is one shuffled
/// pass in minibatches of `minibatch` samples.
CriticFitReport critic_fit(CriticNet& critic, std::span<const Trajectory> trajectories, double gamma, double lambda,
                           std::size_t epochs, std::size_t minibatch, Rng& rng);

}  // namespace svpg
