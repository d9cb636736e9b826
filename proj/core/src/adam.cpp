#include "svpg/adam.hpp"

#include <cmath>

#include "svpg/errors.hpp"

namespace svpg {

void AdamConfig::validate() const {
  if (!(step_size > 0.0)) throw ConfigError("adam step size must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw ConfigError("adam beta1 must lie in (0,1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw ConfigError("adam beta2 must lie in (0,1)");
  if (!(eps_hat > 0.0)) throw ConfigError("adam eps_hat must be positive");
}

AdamState AdamState::zeros(Eigen::Index size, const AdamConfig& config) {
  config.validate();
  return {Eigen::VectorXd::Zero(size), Eigen::VectorXd::Zero(size), 0, config};
}

void adam_step(AdamState& state, Eigen::Ref<Eigen::VectorXd> params,
               const Eigen::Ref<const Eigen::VectorXd>& grad, StepDirection direction, int particle) {
  const auto n = static_cast<std::size_t>(params.size());
  require_size(static_cast<std::size_t>(grad.size()), n, "adam gradient");
  require_size(static_cast<std::size_t>(state.first_moment.size()), n, "adam first moment");
  require_size(static_cast<std::size_t>(state.second_moment.size()), n, "adam second moment");
  require_finite(grad, "gradient in adam step", particle);

  const auto& c = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  const double sign = direction == StepDirection::ascent ? 1.0 : -1.0;

  state.first_moment = c.beta1 * state.first_moment + (1.0 - c.beta1) * grad;
  state.second_moment = c.beta2 * state.second_moment + (1.0 - c.beta2) * grad.cwiseProduct(grad);
  for (Eigen::Index k = 0; k < params.size(); ++k) {
    const double m_hat = state.first_moment[k] / bias1;
    const double v_hat = state.second_moment[k] / bias2;
    params[k] += sign * c.step_size * m_hat / (std::sqrt(v_hat) + c.eps_hat);
  }
}

}  // namespace svpg
