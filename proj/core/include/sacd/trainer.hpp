#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sacd/adam.hpp"
#include "sacd/env.hpp"
#include "sacd/mlp.hpp"
#include "sacd/policy.hpp"
#include "sacd/replay.hpp"
#include "sacd/shaping.hpp"

namespace sacd {

enum class Variant { Sac, SacDNaive, SacD, SacDCagrad };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct VariantConfig {
  Variant variant = Variant::SacD;
  double gamma = 0.99;
  double lr_actor = 3e-4;
  double lr_critic = 3e-4;
  int batch_size = 256;
  double eta = 5e-3;  // target network EMA step
  double entropy_target = -1.0;
  bool adapt_alpha = true;
  double init_alpha = 0.2;
  double cagrad_c = 0.5;
  bool hidden_grad_division = true;
  bool paper_literal_entropy_sign = false;
  bool original_cagrad_direction = false;
  std::vector<int> hidden_sizes = {256, 256};
};

/// Twin multi-head Q-networks plus twin targets. Heads 0..m-1 track the
/// environmental components, head m the entropy component (plain SAC uses a
/// single head).
struct DecomposedCritic {
  MlpSpec spec;  // input obs_dim + action_dim
  int num_heads = 1;
  std::vector<double> online1, online2, target1, target2;

  static DecomposedCritic make(int obs_dim, int action_dim, int num_heads,
                               std::vector<int> hidden, std::uint64_t seed);
  std::vector<double> forward(const std::vector<double>& params, std::span<const double> s,
                              std::span<const double> a, ForwardCache* cache = nullptr) const;
};

double composite_value(std::span<const double> q, std::span<const double> w);

/// Entropy component reward r_{m+1}. The sign is flipped relative to the
/// literal +gamma*alpha*log pi so the composite target matches the scalar
/// SAC target; literal_sign restores the unflipped form.
double entropy_component_reward(double logp_next, double alpha, double gamma, bool terminated,
                                bool literal_sign = false);

/// 0-based index of the twin target network with the minimum composite
/// value; ties go to the first.
int select_target_network(std::span<const double> qbar1, std::span<const double> qbar2,
                          std::span<const double> w);

/// y_i = r_i + gamma * (1 - terminated) * qbar_i, with sign-constrained
/// environmental components clipped per their ComponentSpec.
std::vector<double> component_targets(std::span<const double> r_ext,
                                      std::span<const double> qbar, double gamma, bool terminated,
                                      const std::vector<ComponentSpec>& comps);

/// Per-component losses LQ_i = mean over rows of sum over twins of
/// 0.5*(Q_i - y_i)^2, plus sign penalties where configured.
std::vector<double> critic_component_losses(const std::vector<std::vector<double>>& q1,
                                            const std::vector<std::vector<double>>& q2,
                                            const std::vector<std::vector<double>>& y,
                                            const std::vector<ComponentSpec>& comps);

struct StepMetrics {
  std::int64_t step = 0;
  std::vector<double> component_losses;
  std::vector<double> cagrad_w;  // empty unless SAC-D-CAGrad
  std::vector<double> weights;   // scheduled weights used this step
  double alpha = 0.0;
  double policy_loss = 0.0;
  double critic_grad_norm = 0.0;
  double policy_grad_norm = 0.0;
};

/// Owns critic, policy, optimizers and the entropy temperature; one call to
/// update_step performs one full Algorithm-1 gradient step on a minibatch.
class Trainer {
 public:
  Trainer(const EnvSpec& env_spec, VariantConfig cfg, std::vector<ComponentSpec> comps,
          std::uint64_t seed);

  StepMetrics update_step(const std::vector<Transition>& batch);

  const VariantConfig& config() const { return cfg_; }
  const std::vector<ComponentSpec>& components() const { return comps_; }
  SquashedGaussianPolicy& policy() { return policy_; }
  const SquashedGaussianPolicy& policy() const { return policy_; }
  DecomposedCritic& critic() { return critic_; }
  const DecomposedCritic& critic() const { return critic_; }
  double alpha() const;
  double& log_alpha() { return log_alpha_; }
  std::int64_t gradient_steps() const { return gradient_steps_; }
  std::int64_t& gradient_steps() { return gradient_steps_; }
  AdamState& critic_opt() { return critic_opt_; }
  AdamState& policy_opt() { return policy_opt_; }
  AdamState& alpha_opt() { return alpha_opt_; }

  /// Scheduled weights (length num_heads) at the current gradient step.
  std::vector<double> current_weights() const;

  int num_heads() const { return critic_.num_heads; }
  bool decomposed() const { return cfg_.variant != Variant::Sac; }

 private:
  EnvSpec env_spec_;
  VariantConfig cfg_;
  std::vector<ComponentSpec> comps_;  // environmental components only
  DecomposedCritic critic_;
  SquashedGaussianPolicy policy_;
  AdamState critic_opt_, policy_opt_, alpha_opt_;
  double log_alpha_;
  std::int64_t gradient_steps_ = 0;
  std::mt19937_64 noise_rng_;
};

}  // namespace sacd
