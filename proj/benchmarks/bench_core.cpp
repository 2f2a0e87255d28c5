#include <benchmark/benchmark.h>

#include <random>

#include "sacd/cagrad.hpp"
#include "sacd/mlp.hpp"
#include "sacd/policy.hpp"

namespace {

void BM_MlpForward(benchmark::State& state) {
  const sacd::MlpSpec spec{8, {256, 256}, 5};
  const std::vector<double> params = sacd::mlp_init(spec, 1);
  const std::vector<double> x(8, 0.3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sacd::mlp_forward(spec, params, x));
  }
}
BENCHMARK(BM_MlpForward);

void BM_MlpBackward(benchmark::State& state) {
  const sacd::MlpSpec spec{8, {256, 256}, 5};
  const std::vector<double> params = sacd::mlp_init(spec, 1);
  const std::vector<double> x(8, 0.3);
  sacd::ForwardCache cache;
  sacd::mlp_forward(spec, params, x, &cache);
  const std::vector<double> upstream(5, 1.0);
  std::vector<double> grad(params.size());
  for (auto _ : state) {
    std::fill(grad.begin(), grad.end(), 0.0);
    sacd::mlp_backward(spec, params, cache, upstream, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_MlpBackward);

void BM_CagradSolve(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  sacd::HeadGradients grads;
  grads.heads.assign(5, std::vector<double>(4096));
  for (auto& h : grads.heads)
    for (double& x : h) x = normal(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sacd::cagrad_weights(grads, 0.5));
  }
}
BENCHMARK(BM_CagradSolve);

void BM_PolicySample(benchmark::State& state) {
  const auto policy = sacd::SquashedGaussianPolicy::make(8, 2, {256, 256}, 3);
  const std::vector<double> s(8, 0.1);
  const std::vector<double> noise = {0.4, -0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sacd::sample_action(policy, s, noise));
  }
}
BENCHMARK(BM_PolicySample);

}  // namespace

BENCHMARK_MAIN();
