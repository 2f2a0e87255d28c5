#include "sacd/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace sacd {

bool MlpSpec::valid() const {
  if (input_dim < 1 || output_dim < 1 || hidden_sizes.empty()) return false;
  return std::all_of(hidden_sizes.begin(), hidden_sizes.end(), [](int h) { return h >= 1; });
}

int MlpSpec::layer_in(int layer) const {
  return layer == 0 ? input_dim : hidden_sizes[layer - 1];
}

int MlpSpec::layer_out(int layer) const {
  return layer == num_layers() - 1 ? output_dim : hidden_sizes[layer];
}

int param_count(const MlpSpec& spec) {
  int n = 0;
  for (int l = 0; l < spec.num_layers(); ++l) n += spec.layer_in(l) * spec.layer_out(l) + spec.layer_out(l);
  return n;
}

int trunk_param_count(const MlpSpec& spec) {
  const int last = spec.num_layers() - 1;
  return param_count(spec) - (spec.layer_in(last) * spec.layer_out(last) + spec.layer_out(last));
}

std::vector<double> mlp_init(const MlpSpec& spec, std::uint64_t seed) {
  if (!spec.valid()) throw std::invalid_argument("mlp_init: invalid spec");
  std::mt19937_64 rng(seed);
  std::vector<double> params(param_count(spec));
  std::size_t k = 0;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int fan_in = spec.layer_in(l);
    const int fan_out = spec.layer_out(l);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (int i = 0; i < fan_in * fan_out; ++i) params[k++] = dist(rng);
    k += static_cast<std::size_t>(fan_out);  // biases stay zero
  }
  return params;
}

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> params,
                                std::span<const double> x, ForwardCache* cache) {
  if (static_cast<int>(x.size()) != spec.input_dim)
    throw std::invalid_argument("mlp_forward: input size " + std::to_string(x.size()) +
                                " != " + std::to_string(spec.input_dim));
  if (static_cast<int>(params.size()) != param_count(spec))
    throw std::invalid_argument("mlp_forward: parameter vector length mismatch");

  std::vector<double> cur(x.begin(), x.end());
  if (cache) {
    cache->act.clear();
    cache->act.push_back(cur);
  }
  std::size_t k = 0;
  for (int l = 0; l < spec.num_layers(); ++l) {
    const int fan_in = spec.layer_in(l);
    const int fan_out = spec.layer_out(l);
    const double* W = params.data() + k;
    const double* b = params.data() + k + static_cast<std::size_t>(fan_in) * fan_out;
    std::vector<double> next(fan_out);
    for (int o = 0; o < fan_out; ++o) {
      double z = b[o];
      const double* row = W + static_cast<std::size_t>(o) * fan_in;
      for (int i = 0; i < fan_in; ++i) z += row[i] * cur[i];
      next[o] = (l == spec.num_layers() - 1) ? z : std::max(0.0, z);
    }
    cur = std::move(next);
    if (cache) cache->act.push_back(cur);
    k += static_cast<std::size_t>(fan_in) * fan_out + fan_out;
  }
  return cur;
}

void mlp_backward(const MlpSpec& spec, std::span<const double> params, const ForwardCache& cache,
                  std::span<const double> upstream, std::span<double> grad_params,
                  std::vector<double>* grad_input) {
  if (static_cast<int>(upstream.size()) != spec.output_dim)
    throw std::invalid_argument("mlp_backward: upstream size mismatch");
  if (grad_params.size() != static_cast<std::size_t>(param_count(spec)))
    throw std::invalid_argument("mlp_backward: grad_params length mismatch");
  if (cache.act.size() != static_cast<std::size_t>(spec.num_layers()) + 1)
    throw std::invalid_argument("mlp_backward: cache does not match spec");

  // Layer parameter offsets.
  std::vector<std::size_t> offs(spec.num_layers());
  std::size_t k = 0;
  for (int l = 0; l < spec.num_layers(); ++l) {
    offs[l] = k;
    k += static_cast<std::size_t>(spec.layer_in(l)) * spec.layer_out(l) + spec.layer_out(l);
  }

  std::vector<double> delta(upstream.begin(), upstream.end());
  for (int l = spec.num_layers() - 1; l >= 0; --l) {
    const int fan_in = spec.layer_in(l);
    const int fan_out = spec.layer_out(l);
    const double* W = params.data() + offs[l];
    double* gW = grad_params.data() + offs[l];
    double* gb = gW + static_cast<std::size_t>(fan_in) * fan_out;
    const std::vector<double>& in = cache.act[l];
    // ReLU mask on this layer's output (hidden layers only): post-activation
    // is zero exactly where the pre-activation was clipped.
    if (l != spec.num_layers() - 1) {
      const std::vector<double>& out = cache.act[l + 1];
      for (int o = 0; o < fan_out; ++o)
        if (out[o] <= 0.0) delta[o] = 0.0;
    }
    std::vector<double> prev(fan_in, 0.0);
    for (int o = 0; o < fan_out; ++o) {
      const double d = delta[o];
      gb[o] += d;
      const double* row = W + static_cast<std::size_t>(o) * fan_in;
      double* grow = gW + static_cast<std::size_t>(o) * fan_in;
      if (d != 0.0) {
        for (int i = 0; i < fan_in; ++i) {
          grow[i] += d * in[i];
          prev[i] += d * row[i];
        }
      }
    }
    delta = std::move(prev);
  }
  if (grad_input) *grad_input = std::move(delta);
}

}  // namespace sacd
