#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sacd {

struct AdamState {
  std::vector<double> m;  // first moments
  std::vector<double> v;  // second moments
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

/// Bias-corrected Adam update in place. Throws on a non-finite gradient
/// entry, naming the offending index.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state,
               double lr);

}  // namespace sacd
