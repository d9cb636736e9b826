#pragma once

// Stein variational sampling of the 1-D mixture ½N(−2, 1) + ½N(2, 1): the
// score of the mixture plays the role of the utility gradient at α = 1.

#include <cmath>
#include <vector>

#include "svpg/adam.hpp"
#include "svpg/rng.hpp"
#include "svpg/svgd.hpp"

namespace gmm {

inline double score(double x) {
  const double a = std::exp(-0.5 * (x + 2) * (x + 2)), b = std::exp(-0.5 * (x - 2) * (x - 2));
  return (-(x + 2) * a - (x - 2) * b) / (a + b);
}

struct Result {
  double mean = 0.0;
  double variance = 0.0;
  double left_fraction = 0.0;
  double right_fraction = 0.0;
  std::vector<double> samples;
};

inline Result sample(std::size_t n, std::size_t steps, std::uint64_t seed) {
  svpg::Rng rng(seed);
  std::normal_distribution<double> init(0.0, 1.0);
  std::vector<svpg::ParamVector> particles(n, svpg::ParamVector(1));
  for (auto& p : particles) p[0] = init(rng);
  std::vector<svpg::AdamState> adam(n, svpg::AdamState::zeros(1, {.step_size = 0.05}));
  std::vector<Eigen::VectorXd> grads(n, Eigen::VectorXd(1));
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) grads[i][0] = score(particles[i][0]);
    const auto dir = svpg::svpg_direction(particles, grads, {}, 1.0, svpg::median_bandwidth(particles));
    for (std::size_t i = 0; i < n; ++i) {
      svpg::adam_step(adam[i], particles[i], dir.directions[i], svpg::StepDirection::ascent);
    }
  }
  Result r;
  for (const auto& p : particles) {
    r.samples.push_back(p[0]);
    r.mean += p[0];
    r.left_fraction += p[0] < 0 ? 1 : 0;
  }
  const double nd = static_cast<double>(n);
  r.mean /= nd;
  for (double x : r.samples) r.variance += (x - r.mean) * (x - r.mean);
  r.variance /= nd;
  r.left_fraction /= nd;
  r.right_fraction = 1.0 - r.left_fraction;
  return r;
}

}  // namespace gmm
