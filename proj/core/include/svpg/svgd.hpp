#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "svpg/types.hpp"

namespace svpg {

/// Linear temperature schedule from `initial_alpha` to `final_alpha` over
/// `iterations` iterations, constant afterwards.
struct AnnealSchedule {
  double initial_alpha = 10.0;
  double final_alpha = 10.0;
  std::size_t iterations = 1;
};

/// `identity` replaces the RBF Gram matrix by I and drops the repulsive term.
/// It exists for structural-equivalence tests against independent training.
enum class KernelMode { rbf, identity };

struct SvpgConfig {
  /// Temperature α. Larger values weight the repulsive term more.
  double alpha = 10.0;
  std::optional<AnnealSchedule> anneal;
  KernelMode kernel = KernelMode::rbf;
  /// Clip each utility gradient to this L2 norm before the Stein update (0 = off).
  double max_grad_norm = 0.0;

  void validate() const;
};

double anneal_alpha(const SvpgConfig& config, std::size_t iteration);

/// h = med² / log(n + 1), med = lower-middle pairwise Euclidean distance.
/// Returns 1 for n = 1 and, with a warning, when all particles coincide.
double median_bandwidth(std::span<const ParamVector> particles);

struct RbfValue {
  double value = 0.0;
  Eigen::VectorXd grad_wrt_a;
};

/// k(a, b) = exp(−‖a − b‖² / h) and its gradient with respect to a.
RbfValue rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b, double h);

struct KernelEval {
  /// gram(j, i) = k(θ_j, θ_i)
  Eigen::MatrixXd gram;
  /// grads[j][i] = ∇_{θ_j} k(θ_j, θ_i); filled only on request.
  std::vector<std::vector<Eigen::VectorXd>> grads;
  double bandwidth = 1.0;
};

KernelEval kernel_eval(std::span<const ParamVector> particles, double h, bool with_grads = false);

struct SteinDirection {
  std::vector<Eigen::VectorXd> directions;
  /// The two components of each direction (both already divided by n).
  std::vector<Eigen::VectorXd> driver;
  std::vector<Eigen::VectorXd> repulsion;
  double bandwidth = 1.0;
  double mean_offdiag_gram = 0.0;
  /// Mean over particles of ‖repulsion_i‖ / ‖driver_i‖ (particles with a zero
  /// driver are skipped; NaN when none remain).
  double repulsion_ratio = 0.0;
};

/// Δθ_i = (1/n) Σ_j [ ((1/α) ∇J(θ_j) + ∇log q0(θ_j)) k(θ_j, θ_i) + ∇_{θ_j} k(θ_j, θ_i) ].
/// An empty `prior_grads` means the flat prior (zero score).
SteinDirection svpg_direction(std::span<const ParamVector> particles, std::span<const Eigen::VectorXd> utility_grads,
                              std::span<const Eigen::VectorXd> prior_grads, double alpha, double h,
                              KernelMode mode = KernelMode::rbf);

}  // namespace svpg
