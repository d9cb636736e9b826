#include "svpg/svgd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "svpg/errors.hpp"
#include "svpg/logging.hpp"

namespace svpg {

void SvpgConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("temperature must be positive");
  if (anneal) {
    if (!(anneal->initial_alpha > 0.0) || !(anneal->final_alpha > 0.0)) {
      throw ConfigError("temperature must be positive (anneal endpoints)");
    }
    if (anneal->iterations < 1) throw ConfigError("anneal schedule needs at least one iteration");
  }
  if (!(max_grad_norm >= 0.0)) throw ConfigError("max_grad_norm must be >= 0");
}

double anneal_alpha(const SvpgConfig& config, std::size_t iteration) {
  if (!config.anneal) return config.alpha;
  const auto& s = *config.anneal;
  if (!(s.initial_alpha > 0.0) || !(s.final_alpha > 0.0)) throw ConfigError("temperature must be positive");
  if (iteration >= s.iterations) return s.final_alpha;
  const double frac = static_cast<double>(iteration) / static_cast<double>(s.iterations);
  return s.initial_alpha + (s.final_alpha - s.initial_alpha) * frac;
}

double median_bandwidth(std::span<const ParamVector> particles) {
  const std::size_t n = particles.size();
  if (n == 0) throw Error("median_bandwidth needs at least one particle");
  if (n == 1) return 1.0;
  std::vector<double> dists;
  dists.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      require_size(static_cast<std::size_t>(particles[j].size()), static_cast<std::size_t>(particles[i].size()),
                   "particle");
      dists.push_back((particles[i] - particles[j]).norm());
    }
  }
  const auto mid = dists.begin() + static_cast<std::ptrdiff_t>((dists.size() - 1) / 2);
  std::nth_element(dists.begin(), mid, dists.end());
  const double med = *mid;
  if (!(med > 0.0)) {
    warn("median pairwise particle distance is zero; falling back to bandwidth 1");
    return 1.0;
  }
  return med * med / std::log(static_cast<double>(n) + 1.0);
}

RbfValue rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b, double h) {
  require_size(static_cast<std::size_t>(b.size()), static_cast<std::size_t>(a.size()), "kernel argument");
  if (!(h > 0.0)) throw Error("kernel bandwidth must be positive");
  const Eigen::VectorXd diff = a - b;
  RbfValue r;
  r.value = std::exp(-diff.squaredNorm() / h);
  r.grad_wrt_a = (-2.0 / h * r.value) * diff;
  return r;
}

KernelEval kernel_eval(std::span<const ParamVector> particles, double h, bool with_grads) {
  const std::size_t n = particles.size();
  KernelEval k;
  k.bandwidth = h;
  k.gram.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  if (with_grads) k.grads.assign(n, std::vector<Eigen::VectorXd>(n));
  for (std::size_t j = 0; j < n; ++j) {
    k.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = 1.0;
    if (with_grads) k.grads[j][j] = Eigen::VectorXd::Zero(particles[j].size());
    for (std::size_t i = j + 1; i < n; ++i) {
      const auto r = rbf_kernel(particles[j], particles[i], h);
      k.gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = r.value;
      k.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r.value;
      if (with_grads) {
        k.grads[i][j] = -r.grad_wrt_a;
        k.grads[j][i] = r.grad_wrt_a;
      }
    }
  }
  return k;
}

SteinDirection svpg_direction(std::span<const ParamVector> particles, std::span<const Eigen::VectorXd> utility_grads,
                              std::span<const Eigen::VectorXd> prior_grads, double alpha, double h, KernelMode mode) {
  const std::size_t n = particles.size();
  if (n == 0) throw Error("svpg_direction needs at least one particle");
  if (!(alpha > 0.0)) throw ConfigError("temperature must be positive");
  require_size(utility_grads.size(), n, "utility gradient list");
  if (!prior_grads.empty()) require_size(prior_grads.size(), n, "prior gradient list");
  const auto dim = particles.front().size();
  for (std::size_t j = 0; j < n; ++j) {
    require_size(static_cast<std::size_t>(particles[j].size()), static_cast<std::size_t>(dim), "particle");
    require_size(static_cast<std::size_t>(utility_grads[j].size()), static_cast<std::size_t>(dim), "utility gradient");
    require_finite(particles[j], "particle parameters", static_cast<int>(j));
    require_finite(utility_grads[j], "utility gradient", static_cast<int>(j));
    if (!prior_grads.empty()) require_finite(prior_grads[j], "prior gradient", static_cast<int>(j));
  }

  const double inv_alpha = 1.0 / alpha;
  std::vector<Eigen::VectorXd> scores(n);
  for (std::size_t j = 0; j < n; ++j) {
    scores[j] = inv_alpha * utility_grads[j];
    if (!prior_grads.empty()) scores[j] += prior_grads[j];
  }

  Eigen::MatrixXd gram;
  if (mode == KernelMode::identity) {
    gram = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  } else {
    gram = kernel_eval(particles, h).gram;
  }

  SteinDirection out;
  out.bandwidth = h;
  out.directions.resize(n);
  out.driver.resize(n);
  out.repulsion.resize(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  const double rep_scale = -2.0 / h;
  double ratio_sum = 0.0;
  std::size_t ratio_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Eigen::VectorXd driver = scores[0] * gram(0, ii);
    for (std::size_t j = 1; j < n; ++j) driver += scores[j] * gram(static_cast<Eigen::Index>(j), ii);
    Eigen::VectorXd repulsion = Eigen::VectorXd::Zero(dim);
    if (mode == KernelMode::rbf) {
      // ∇_{θ_j} k(θ_j, θ_i) = −(2/h)(θ_j − θ_i) k(θ_j, θ_i)
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        repulsion += (rep_scale * gram(static_cast<Eigen::Index>(j), ii)) * (particles[j] - particles[i]);
      }
    }
    out.directions[i] = (driver + repulsion) * inv_n;
    out.driver[i] = driver * inv_n;
    out.repulsion[i] = repulsion * inv_n;
    const double dn = out.driver[i].norm();
    if (dn > 0.0) {
      ratio_sum += out.repulsion[i].norm() / dn;
      ++ratio_count;
    }
  }
  out.repulsion_ratio = ratio_count ? ratio_sum / static_cast<double>(ratio_count) : std::numeric_limits<double>::quiet_NaN();
  if (n > 1) {
    out.mean_offdiag_gram = (gram.sum() - gram.trace()) / static_cast<double>(n * (n - 1));
  }
  return out;
}

}  // namespace svpg
