#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "svpg/rng.hpp"
#include "svpg/types.hpp"

namespace svpg {

enum class Activation { tanh, linear };

/// Architecture of a dense feed-forward network.
///
/// `layer_sizes` lists the input size, hidden sizes and output size;
/// `activations[l]` applies to the output of weight layer l, so there is one
/// activation per weight layer. The output layer is always linear.
struct NetSpec {
  std::vector<std::size_t> layer_sizes;
  std::vector<Activation> activations;

  /// tanh hidden layers, linear output.
  static NetSpec mlp(std::size_t input, std::span<const std::size_t> hidden, std::size_t output);

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  std::size_t num_weight_layers() const { return layer_sizes.size() - 1; }
  std::size_t param_count() const;

  /// Throws DimensionError when the invariants do not hold.
  void validate() const;

  bool operator==(const NetSpec&) const = default;
};

/// Where each layer lives in the flat parameter vector. Layout per layer:
/// weights (rows = fan_out, cols = fan_in, row-major), then bias.
struct LayerSlice {
  std::size_t weight_offset;
  std::size_t bias_offset;
  std::size_t rows;
  std::size_t cols;
};

std::vector<LayerSlice> layer_slices(const NetSpec& spec);

struct LayerParams {
  RowMajorMatrix weights;
  Eigen::VectorXd bias;
};

std::vector<LayerParams> unflatten(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params);
ParamVector flatten(const NetSpec& spec, std::span<const LayerParams> layers);

/// Uniform Glorot init: W ~ U(-sqrt(6/(fan_in+fan_out)), +...), zero biases.
ParamVector init_params(const NetSpec& spec, Rng& rng);

Eigen::VectorXd net_forward(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& input);

/// Exact gradient of <net(input), cotangent> with respect to params.
GradientEstimate net_backward(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                              const Eigen::Ref<const Eigen::VectorXd>& input,
                              const Eigen::Ref<const Eigen::VectorXd>& output_cotangent);

/// Activations kept by a batched forward pass for the backward pass.
/// activations[0] is the input batch (one column per sample).
struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;
};

/// Batched forward pass over the columns of `inputs`.
Eigen::MatrixXd net_forward_batch(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                                  const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                  ForwardCache* cache = nullptr);

/// Adds sum_b d<net(x_b), c_b>/dparams into `grad` (which must be sized to the
/// net's parameter count). Requires the cache from net_forward_batch.
void net_backward_batch(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                        const ForwardCache& cache, const Eigen::Ref<const Eigen::MatrixXd>& cotangents,
                        Eigen::Ref<Eigen::VectorXd> grad);

/// Reusable buffers for allocation-free single-sample forward passes
/// (the per-step hot path of rollouts).
class NetEvaluator {
 public:
  explicit NetEvaluator(const NetSpec& spec);

  /// Result stays valid until the next call.
  const Eigen::VectorXd& forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                                 const Eigen::Ref<const Eigen::VectorXd>& input);

 private:
  NetSpec spec_;
  std::vector<LayerSlice> slices_;
  std::vector<Eigen::VectorXd> buffers_;
};

}  // namespace svpg
