#include "sacd/policy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sacd {
namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(z)^2) without cancellation for large |z|.
double log_one_minus_tanh_sq(double z) {
  return 2.0 * (std::numbers::ln2 - z - softplus(-2.0 * z));
}

}  // namespace

SquashedGaussianPolicy SquashedGaussianPolicy::make(int obs_dim, int action_dim,
                                                    std::vector<int> hidden, std::uint64_t seed) {
  SquashedGaussianPolicy p;
  p.spec = MlpSpec{obs_dim, std::move(hidden), 2 * action_dim};
  p.params = mlp_init(p.spec, seed);
  p.action_dim = action_dim;
  return p;
}

PolicySample sample_action(const SquashedGaussianPolicy& policy, std::span<const double> s,
                           std::span<const double> noise) {
  const int d = policy.action_dim;
  if (static_cast<int>(noise.size()) != d)
    throw std::invalid_argument("sample_action: noise size != action_dim");

  PolicySample out;
  out.noise.assign(noise.begin(), noise.end());
  const std::vector<double> heads = mlp_forward(policy.spec, policy.params, s, &out.cache);

  out.mu.assign(heads.begin(), heads.begin() + d);
  out.log_std.resize(d);
  out.sigma.resize(d);
  out.z.resize(d);
  out.action.resize(d);
  out.clamped.resize(d);
  constexpr double half_log_2pi = 0.9189385332046727;  // 0.5 * log(2*pi)
  double logp = 0.0;
  for (int i = 0; i < d; ++i) {
    const double raw = heads[d + i];
    const bool lo = raw < SquashedGaussianPolicy::kLogStdMin;
    const bool hi = raw > SquashedGaussianPolicy::kLogStdMax;
    out.clamped[i] = lo || hi;
    out.log_std[i] = lo ? SquashedGaussianPolicy::kLogStdMin
                        : (hi ? SquashedGaussianPolicy::kLogStdMax : raw);
    out.sigma[i] = std::exp(out.log_std[i]);
    out.z[i] = out.mu[i] + out.sigma[i] * noise[i];
    out.action[i] = std::tanh(out.z[i]);
    logp += -half_log_2pi - out.log_std[i] - 0.5 * noise[i] * noise[i]
            - log_one_minus_tanh_sq(out.z[i]);
  }
  out.logp = logp;
  return out;
}

std::vector<double> deterministic_action(const SquashedGaussianPolicy& policy,
                                         std::span<const double> s) {
  const std::vector<double> heads = mlp_forward(policy.spec, policy.params, s);
  std::vector<double> a(policy.action_dim);
  for (int i = 0; i < policy.action_dim; ++i) a[i] = std::tanh(heads[i]);
  return a;
}

void policy_backward(const SquashedGaussianPolicy& policy, const PolicySample& sample,
                     double dlogp, std::span<const double> dact, std::span<double> grad_accum) {
  const int d = policy.action_dim;
  if (static_cast<int>(dact.size()) != d && !dact.empty())
    throw std::invalid_argument("policy_backward: dact size mismatch");

  std::vector<double> upstream(2 * d, 0.0);
  for (int i = 0; i < d; ++i) {
    const double tz = sample.action[i];           // tanh(z)
    const double dadz = 1.0 - tz * tz;
    const double da = dact.empty() ? 0.0 : dact[i];
    const double dz = dlogp * 2.0 * tz + da * dadz;  // total dL/dz
    upstream[i] = dz;                                // via mu
    if (!sample.clamped[i]) {
      const double dzdls = sample.sigma[i] * sample.noise[i];
      upstream[d + i] = dlogp * (-1.0) + dz * dzdls;
    }
  }
  mlp_backward(policy.spec, policy.params, sample.cache, upstream, grad_accum);
}

}  // namespace sacd
