#pragma once

// Small reference computations shared by unit and acceptance tests. They are
// deliberately written without the library's helpers (plain loops, scalar
// math) so they can serve as independent oracles.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "svpg/net.hpp"

namespace oracle {

/// Plain-loop forward pass over the documented flat layout
/// (per layer: row-major weights, then bias).
inline Eigen::VectorXd forward(const svpg::NetSpec& spec, const Eigen::VectorXd& p, const Eigen::VectorXd& x) {
  std::vector<double> cur(x.data(), x.data() + x.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const std::size_t in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    std::vector<double> next(out, 0.0);
    for (std::size_t r = 0; r < out; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < in; ++c) s += p[static_cast<Eigen::Index>(off + r * in + c)] * cur[c];
      s += p[static_cast<Eigen::Index>(off + out * in + r)];
      next[r] = spec.activations[l] == svpg::Activation::tanh ? std::tanh(s) : s;
    }
    off += out * in + out;
    cur = std::move(next);
  }
  return Eigen::Map<Eigen::VectorXd>(cur.data(), static_cast<Eigen::Index>(cur.size()));
}

/// forward() in extended precision, for finite-difference oracles whose
/// round-off would otherwise swamp small derivatives.
using Ld = long double;
using LdVector = std::vector<Ld>;

inline LdVector forward_ld(const svpg::NetSpec& spec, const LdVector& p, const Eigen::VectorXd& x) {
  LdVector cur(x.data(), x.data() + x.size());
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < spec.layer_sizes.size(); ++l) {
    const std::size_t in = spec.layer_sizes[l], out = spec.layer_sizes[l + 1];
    LdVector next(out, 0.0L);
    for (std::size_t r = 0; r < out; ++r) {
      Ld s = 0.0L;
      for (std::size_t c = 0; c < in; ++c) s += p[off + r * in + c] * cur[c];
      s += p[off + out * in + r];
      next[r] = spec.activations[l] == svpg::Activation::tanh ? std::tanh(s) : s;
    }
    off += out * in + out;
    cur = std::move(next);
  }
  return cur;
}

/// Central differences of f evaluated in long double at x ± step·e_i.
inline Eigen::VectorXd central_diff_ld(const std::function<Ld(const LdVector&)>& f, const Eigen::VectorXd& x0,
                                       double step) {
  LdVector x(x0.data(), x0.data() + x0.size());
  Eigen::VectorXd g(x0.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const Ld saved = x[i];
    x[i] = saved + step;
    const Ld plus = f(x);
    x[i] = saved - step;
    const Ld minus = f(x);
    x[i] = saved;
    g[static_cast<Eigen::Index>(i)] = static_cast<double>((plus - minus) / (2.0L * step));
  }
  return g;
}

/// Central finite-difference gradient of a scalar function.
inline Eigen::VectorXd central_diff(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                    double step) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + step;
    const double plus = f(x);
    x[i] = saved - step;
    const double minus = f(x);
    x[i] = saved;
    g[i] = (plus - minus) / (2.0 * step);
  }
  return g;
}

/// max_i |a_i − b_i| / max(|a_i|, |b_i|, floor). The floor keeps coordinates
/// whose true derivative is ~0 from dividing round-off by round-off.
inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-4) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

/// Standard-normal density and CDF.
inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

/// Sample mean and standard error of the mean of each column of `samples`
/// (one row per draw).
struct MeanSe {
  Eigen::VectorXd mean;
  Eigen::VectorXd se;
};

inline MeanSe mean_se(const std::vector<Eigen::VectorXd>& draws) {
  const auto n = static_cast<double>(draws.size());
  MeanSe out{Eigen::VectorXd::Zero(draws.front().size()), Eigen::VectorXd::Zero(draws.front().size())};
  for (const auto& d : draws) out.mean += d;
  out.mean /= n;
  Eigen::VectorXd var = Eigen::VectorXd::Zero(out.mean.size());
  for (const auto& d : draws) var += (d - out.mean).cwiseAbs2();
  var /= (n - 1.0);
  out.se = (var / n).cwiseSqrt();
  return out;
}

/// Stein direction written out term by term with the kernel and its gradient
/// expanded by hand (flat prior).
inline std::vector<Eigen::VectorXd> stein_brute_force(const std::vector<Eigen::VectorXd>& ps,
                                                      const std::vector<Eigen::VectorXd>& g, double alpha, double h) {
  const std::size_t n = ps.size();
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(ps[i].size());
    for (std::size_t j = 0; j < n; ++j) {
      double sq = 0.0;
      for (Eigen::Index d = 0; d < acc.size(); ++d) sq += (ps[j][d] - ps[i][d]) * (ps[j][d] - ps[i][d]);
      const double k = std::exp(-sq / h);
      for (Eigen::Index d = 0; d < acc.size(); ++d) {
        acc[d] += g[j][d] / alpha * k - 2.0 * (ps[j][d] - ps[i][d]) / h * k;
      }
    }
    out.push_back(acc / static_cast<double>(n));
  }
  return out;
}

}  // namespace oracle
