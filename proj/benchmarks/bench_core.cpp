#include <benchmark/benchmark.h>

#include "svpg/envs.hpp"
#include "svpg/estimators.hpp"
#include "svpg/rollout.hpp"
#include "svpg/svgd.hpp"

using namespace svpg;

namespace {

const std::vector<std::size_t> kHidden{100, 50, 25};

void BM_NetForward(benchmark::State& state) {
  Rng rng(1);
  const auto spec = NetSpec::mlp(5, kHidden, 1);
  const auto params = init_params(spec, rng);
  NetEvaluator eval(spec);
  const Eigen::VectorXd x = Eigen::VectorXd::Random(5);
  for (auto _ : state) benchmark::DoNotOptimize(eval.forward(params, x).data());
}
BENCHMARK(BM_NetForward);

void BM_NetBackwardBatch(benchmark::State& state) {
  Rng rng(1);
  const auto spec = NetSpec::mlp(5, kHidden, 1);
  const auto params = init_params(spec, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, state.range(0));
  const Eigen::MatrixXd cot = Eigen::MatrixXd::Ones(1, state.range(0));
  Eigen::VectorXd grad(params.size());
  ForwardCache cache;
  for (auto _ : state) {
    net_forward_batch(spec, params, x, &cache);
    grad.setZero();
    net_backward_batch(spec, params, cache, cot, grad);
    benchmark::DoNotOptimize(grad.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetBackwardBatch)->Arg(256)->Arg(2000);

void BM_EnvStep(benchmark::State& state) {
  const auto id = static_cast<EnvId>(state.range(0));
  Rng rng(3);
  EnvState s = env_reset(id, rng);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, 0.3);
  for (auto _ : state) {
    auto r = env_step(id, s, a);
    s = r.terminal ? env_reset(id, rng) : std::move(r.next_state);
    benchmark::DoNotOptimize(s.observation.data());
  }
  state.SetLabel(std::string(env_name(id)));
}
BENCHMARK(BM_EnvStep)->DenseRange(0, 3);

void BM_Collect(benchmark::State& state) {
  Rng rng(4);
  const auto policy = GaussianPolicy::create(5, 1, kHidden, rng);
  for (auto _ : state) {
    auto trajs = collect(EnvId::swingup, policy, 1000, rng);
    benchmark::DoNotOptimize(trajs.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_Collect)->Unit(benchmark::kMillisecond);

void BM_A2cGradientAndCriticFit(benchmark::State& state) {
  Rng rng(5);
  const auto policy = GaussianPolicy::create(5, 1, kHidden, rng);
  auto critic = CriticNet::create(5, kHidden, rng);
  const auto trajs = collect(EnvId::swingup, policy, 2000, rng);
  for (auto _ : state) {
    auto g = a2c_gradient(trajs, policy, critic, 0.99, 1.0, true);
    auto c = critic;
    critic_fit(c, trajs, 0.99, 1.0, 3, 256, rng);
    benchmark::DoNotOptimize(g.values.data());
  }
}
BENCHMARK(BM_A2cGradientAndCriticFit)->Unit(benchmark::kMillisecond);

void BM_SvpgDirection(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(6);
  const auto spec = NetSpec::mlp(5, kHidden, 1);
  std::vector<ParamVector> particles, grads;
  for (std::size_t i = 0; i < n; ++i) {
    particles.push_back(init_params(spec, rng));
    grads.push_back(Eigen::VectorXd::Random(particles.back().size()));
  }
  for (auto _ : state) {
    const double h = median_bandwidth(particles);
    auto d = svpg_direction(particles, grads, {}, 10.0, h, KernelMode::rbf);
    benchmark::DoNotOptimize(d.directions.data());
  }
}
BENCHMARK(BM_SvpgDirection)->Arg(8)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
