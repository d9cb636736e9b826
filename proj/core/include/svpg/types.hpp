#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

namespace svpg {

/// Flat vector of all trainable parameters of one particle.
using ParamVector = Eigen::VectorXd;

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// An estimate of the gradient of some objective w.r.t. a ParamVector,
/// together with the number of samples (transitions or evaluations) behind it.
struct GradientEstimate {
  Eigen::VectorXd values;
  std::size_t sample_count = 0;
};

/// Throws DimensionError when `actual != expected`.
void require_size(std::size_t actual, std::size_t expected, const char* what);

/// Throws NumericalError naming `what` (and the particle, if >= 0) when any entry is NaN/Inf.
void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what, int particle = -1);

std::string particle_label(int particle);

}  // namespace svpg
