#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sacd/mlp.hpp"

namespace sacd {

/// Stochastic policy: an MLP producing mean and log-std heads of a diagonal
/// Gaussian, squashed through tanh so actions live in (-1, 1)^d.
struct SquashedGaussianPolicy {
  MlpSpec spec;  // output_dim == 2 * action_dim (mu head, then log_std head)
  std::vector<double> params;
  int action_dim = 1;

  static constexpr double kLogStdMin = -20.0;
  static constexpr double kLogStdMax = 2.0;

  static SquashedGaussianPolicy make(int obs_dim, int action_dim,
                                     std::vector<int> hidden, std::uint64_t seed);
};

/// One reparameterized draw plus everything needed to push gradients back
/// through it.
struct PolicySample {
  std::vector<double> action;      // tanh(z)
  double logp = 0.0;               // log pi(action | s)
  std::vector<double> mu;
  std::vector<double> log_std;     // clamped
  std::vector<double> sigma;
  std::vector<double> z;           // mu + sigma * noise
  std::vector<double> noise;
  std::vector<bool> clamped;       // log_std head saturated -> no gradient
  ForwardCache cache;
};

/// a = tanh(mu + sigma * noise); logp includes the tanh change-of-variable
/// correction in the stable form 2*(log2 - z - softplus(-2z)).
PolicySample sample_action(const SquashedGaussianPolicy& policy, std::span<const double> s,
                           std::span<const double> noise);

/// tanh(mu(s)); equals sample_action with zero noise.
std::vector<double> deterministic_action(const SquashedGaussianPolicy& policy,
                                         std::span<const double> s);

/// Accumulates d(dlogp * logp + dact . action)/d(params) into grad_accum.
void policy_backward(const SquashedGaussianPolicy& policy, const PolicySample& sample,
                     double dlogp, std::span<const double> dact, std::span<double> grad_accum);

}  // namespace sacd
