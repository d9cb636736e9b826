#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "svpg/types.hpp"

namespace svpg {

struct AdamConfig {
  double step_size = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;

  void validate() const;
};

/// Moment estimates of one parameter vector. Owned by a single trainer.
struct AdamState {
  Eigen::VectorXd first_moment;
  Eigen::VectorXd second_moment;
  std::uint64_t step_count = 0;
  AdamConfig config;

  static AdamState zeros(Eigen::Index size, const AdamConfig& config = {});
};

enum class StepDirection { ascent, descent };

/// Bias-corrected Adam update applied in place. `ascent` adds the step
/// (utility maximization); `descent` subtracts it (loss minimization).
/// Throws NumericalError (naming `particle` when >= 0) on non-finite gradients;
/// in that case neither params nor state are modified.
void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grad, StepDirection direction, int particle = -1);

}  // namespace svpg
