#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sacd {

/// Fixed-architecture MLP: affine -> ReLU -> ... -> affine (linear output).
/// Parameters live in a flat vector, layer by layer, weights row-major
/// (out x in) followed by biases.
struct MlpSpec {
  int input_dim = 1;
  std::vector<int> hidden_sizes = {256, 256};
  int output_dim = 1;

  bool valid() const;
  int num_layers() const { return static_cast<int>(hidden_sizes.size()) + 1; }
  int layer_in(int layer) const;
  int layer_out(int layer) const;
};

int param_count(const MlpSpec& spec);

/// Parameter index where the final (output) layer starts; everything before
/// it is the shared trunk.
int trunk_param_count(const MlpSpec& spec);

/// Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero biases.
std::vector<double> mlp_init(const MlpSpec& spec, std::uint64_t seed);

/// Saved activations from a forward pass, consumed by mlp_backward.
struct ForwardCache {
  // act[0] is the input; act[l+1] the post-activation output of layer l.
  std::vector<std::vector<double>> act;
};

std::vector<double> mlp_forward(const MlpSpec& spec, std::span<const double> params,
                                std::span<const double> x, ForwardCache* cache = nullptr);

/// Gradients of l = upstream . output. Accumulates into grad_params (caller
/// zeroes); grad_input optional.
void mlp_backward(const MlpSpec& spec, std::span<const double> params, const ForwardCache& cache,
                  std::span<const double> upstream, std::span<double> grad_params,
                  std::vector<double>* grad_input = nullptr);

}  // namespace sacd
