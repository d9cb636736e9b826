#include "svpg/net.hpp"

#include <cmath>
#include <string>

#include "svpg/errors.hpp"

namespace svpg {

namespace {

using ConstRowMap = Eigen::Map<const RowMajorMatrix>;
using RowMap = Eigen::Map<RowMajorMatrix>;

void check_params(const NetSpec& spec, Eigen::Index size) {
  require_size(static_cast<std::size_t>(size), spec.param_count(), "network parameters");
}

// tanh(x) = sign(x) (1 − e^{−2|x|}) / (1 + e^{−2|x|}), built on Eigen's
// vectorized exp. Absolute error stays within a few ulp of 1.
template <typename Derived>
void tanh_in_place(Eigen::MatrixBase<Derived>& m) {
  auto x = m.array();
  const auto e = (-2.0 * x.abs()).exp().eval();
  x = x.sign() * (1.0 - e) / (1.0 + e);
}

}  // namespace

NetSpec NetSpec::mlp(std::size_t input, std::span<const std::size_t> hidden, std::size_t output) {
  NetSpec spec;
  spec.layer_sizes.push_back(input);
  spec.layer_sizes.insert(spec.layer_sizes.end(), hidden.begin(), hidden.end());
  spec.layer_sizes.push_back(output);
  spec.activations.assign(hidden.size(), Activation::tanh);
  spec.activations.push_back(Activation::linear);
  spec.validate();
  return spec;
}

std::size_t NetSpec::param_count() const {
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    count += layer_sizes[l + 1] * layer_sizes[l] + layer_sizes[l + 1];
  }
  return count;
}

void NetSpec::validate() const {
  if (layer_sizes.size() < 2) throw DimensionError("NetSpec needs at least an input and an output layer");
  for (auto s : layer_sizes) {
    if (s == 0) throw DimensionError("NetSpec layer sizes must be >= 1");
  }
  require_size(activations.size(), layer_sizes.size() - 1, "NetSpec activations");
  if (activations.back() != Activation::linear) throw DimensionError("NetSpec output layer must be linear");
}

std::vector<LayerSlice> layer_slices(const NetSpec& spec) {
  std::vector<LayerSlice> slices;
  slices.reserve(spec.num_weight_layers());
  std::size_t offset = 0;
  for (std::size_t l = 0; l < spec.num_weight_layers(); ++l) {
    const std::size_t rows = spec.layer_sizes[l + 1];
    const std::size_t cols = spec.layer_sizes[l];
    slices.push_back({offset, offset + rows * cols, rows, cols});
    offset += rows * cols + rows;
  }
  return slices;
}

std::vector<LayerParams> unflatten(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params) {
  check_params(spec, params.size());
  std::vector<LayerParams> layers;
  for (const auto& s : layer_slices(spec)) {
    LayerParams lp;
    lp.weights = ConstRowMap(params.data() + s.weight_offset, s.rows, s.cols);
    lp.bias = params.segment(s.bias_offset, s.rows);
    layers.push_back(std::move(lp));
  }
  return layers;
}

ParamVector flatten(const NetSpec& spec, std::span<const LayerParams> layers) {
  const auto slices = layer_slices(spec);
  require_size(layers.size(), slices.size(), "layer list");
  ParamVector params(spec.param_count());
  for (std::size_t l = 0; l < slices.size(); ++l) {
    const auto& s = slices[l];
    if (static_cast<std::size_t>(layers[l].weights.rows()) != s.rows ||
        static_cast<std::size_t>(layers[l].weights.cols()) != s.cols) {
      throw DimensionError("layer " + std::to_string(l) + " weight shape mismatch");
    }
    require_size(static_cast<std::size_t>(layers[l].bias.size()), s.rows, "layer bias");
    RowMap(params.data() + s.weight_offset, s.rows, s.cols) = layers[l].weights;
    params.segment(s.bias_offset, s.rows) = layers[l].bias;
  }
  return params;
}

ParamVector init_params(const NetSpec& spec, Rng& rng) {
  spec.validate();
  ParamVector params = ParamVector::Zero(spec.param_count());
  for (const auto& s : layer_slices(spec)) {
    const double limit = std::sqrt(6.0 / static_cast<double>(s.rows + s.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t k = 0; k < s.rows * s.cols; ++k) params[s.weight_offset + k] = dist(rng);
  }
  return params;
}

Eigen::VectorXd net_forward(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                            const Eigen::Ref<const Eigen::VectorXd>& input) {
  NetEvaluator eval(spec);
  return eval.forward(params, input);
}

GradientEstimate net_backward(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                              const Eigen::Ref<const Eigen::VectorXd>& input,
                              const Eigen::Ref<const Eigen::VectorXd>& output_cotangent) {
  require_size(static_cast<std::size_t>(output_cotangent.size()), spec.output_size(), "output cotangent");
  ForwardCache cache;
  net_forward_batch(spec, params, input, &cache);
  GradientEstimate g{Eigen::VectorXd::Zero(spec.param_count()), 1};
  net_backward_batch(spec, params, cache, output_cotangent, g.values);
  return g;
}

Eigen::MatrixXd net_forward_batch(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                                  const Eigen::Ref<const Eigen::MatrixXd>& inputs, ForwardCache* cache) {
  spec.validate();
  check_params(spec, params.size());
  require_size(static_cast<std::size_t>(inputs.rows()), spec.input_size(), "network input");
  const auto slices = layer_slices(spec);
  if (cache) {
    cache->activations.clear();
    cache->activations.reserve(slices.size() + 1);
    cache->activations.emplace_back(inputs);
  }
  Eigen::MatrixXd current = inputs;
  for (std::size_t l = 0; l < slices.size(); ++l) {
    const auto& s = slices[l];
    ConstRowMap w(params.data() + s.weight_offset, s.rows, s.cols);
    Eigen::MatrixXd next = w * current;
    next.colwise() += params.segment(s.bias_offset, s.rows);
    if (spec.activations[l] == Activation::tanh) tanh_in_place(next);
    if (cache) cache->activations.push_back(next);
    current = std::move(next);
  }
  return current;
}

void net_backward_batch(const NetSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& params,
                        const ForwardCache& cache, const Eigen::Ref<const Eigen::MatrixXd>& cotangents,
                        Eigen::Ref<Eigen::VectorXd> grad) {
  check_params(spec, params.size());
  check_params(spec, grad.size());
  const auto slices = layer_slices(spec);
  require_size(cache.activations.size(), slices.size() + 1, "forward cache");
  require_size(static_cast<std::size_t>(cotangents.rows()), spec.output_size(), "output cotangent rows");
  require_size(static_cast<std::size_t>(cotangents.cols()),
               static_cast<std::size_t>(cache.activations.front().cols()), "output cotangent batch");

  Eigen::MatrixXd delta = cotangents;
  for (std::size_t l = slices.size(); l-- > 0;) {
    const auto& s = slices[l];
    if (spec.activations[l] == Activation::tanh) {
      const auto& out = cache.activations[l + 1];
      delta.array() *= 1.0 - out.array().square();
    }
    const auto& in = cache.activations[l];
    RowMap(grad.data() + s.weight_offset, s.rows, s.cols).noalias() += delta * in.transpose();
    grad.segment(s.bias_offset, s.rows) += delta.rowwise().sum();
    if (l > 0) {
      ConstRowMap w(params.data() + s.weight_offset, s.rows, s.cols);
      delta = w.transpose() * delta;
    }
  }
}

NetEvaluator::NetEvaluator(const NetSpec& spec) : spec_(spec), slices_(layer_slices(spec)) {
  spec_.validate();
  buffers_.reserve(slices_.size());
  for (const auto& s : slices_) buffers_.emplace_back(static_cast<Eigen::Index>(s.rows));
}

const Eigen::VectorXd& NetEvaluator::forward(const Eigen::Ref<const Eigen::VectorXd>& params,
                                             const Eigen::Ref<const Eigen::VectorXd>& input) {
  check_params(spec_, params.size());
  require_size(static_cast<std::size_t>(input.size()), spec_.input_size(), "network input");
  for (std::size_t l = 0; l < slices_.size(); ++l) {
    const auto& s = slices_[l];
    ConstRowMap w(params.data() + s.weight_offset, s.rows, s.cols);
    auto& out = buffers_[l];
    if (l == 0) {
      out.noalias() = w * input;
    } else {
      out.noalias() = w * buffers_[l - 1];
    }
    out += params.segment(s.bias_offset, s.rows);
    if (spec_.activations[l] == Activation::tanh) tanh_in_place(out);
  }
  return buffers_.back();
}

}  // namespace svpg
