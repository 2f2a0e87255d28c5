#include "sacd/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sacd/cagrad.hpp"
#include "sacd/rng.hpp"

namespace sacd {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Sac: return "SAC";
    case Variant::SacDNaive: return "SAC-D-NAIVE";
    case Variant::SacD: return "SAC-D";
    case Variant::SacDCagrad: return "SAC-D-CAGRAD";
  }
  throw std::invalid_argument("to_string: unknown variant");
}

Variant variant_from_string(const std::string& s) {
  if (s == "SAC") return Variant::Sac;
  if (s == "SAC-D-NAIVE") return Variant::SacDNaive;
  if (s == "SAC-D") return Variant::SacD;
  if (s == "SAC-D-CAGRAD") return Variant::SacDCagrad;
  throw std::invalid_argument("unknown variant: " + s);
}

DecomposedCritic DecomposedCritic::make(int obs_dim, int action_dim, int num_heads,
                                        std::vector<int> hidden, std::uint64_t seed) {
  DecomposedCritic c;
  c.spec = MlpSpec{obs_dim + action_dim, std::move(hidden), num_heads};
  c.num_heads = num_heads;
  c.online1 = mlp_init(c.spec, seed);
  c.online2 = mlp_init(c.spec, seed + 1);
  c.target1 = c.online1;
  c.target2 = c.online2;
  return c;
}

std::vector<double> DecomposedCritic::forward(const std::vector<double>& params,
                                              std::span<const double> s, std::span<const double> a,
                                              ForwardCache* cache) const {
  std::vector<double> x;
  x.reserve(s.size() + a.size());
  x.insert(x.end(), s.begin(), s.end());
  x.insert(x.end(), a.begin(), a.end());
  return mlp_forward(spec, params, x, cache);
}

double composite_value(std::span<const double> q, std::span<const double> w) {
  if (q.size() != w.size()) throw std::invalid_argument("composite_value: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += w[i] * q[i];
  return s;
}

double entropy_component_reward(double logp_next, double alpha, double gamma, bool terminated,
                                bool literal_sign) {
  if (terminated) return 0.0;
  const double r = gamma * alpha * logp_next;
  return literal_sign ? r : -r;
}

int select_target_network(std::span<const double> qbar1, std::span<const double> qbar2,
                          std::span<const double> w) {
  return composite_value(qbar1, w) <= composite_value(qbar2, w) ? 0 : 1;
}

std::vector<double> component_targets(std::span<const double> r_ext,
                                      std::span<const double> qbar, double gamma, bool terminated,
                                      const std::vector<ComponentSpec>& comps) {
  if (r_ext.size() != qbar.size())
    throw std::invalid_argument("component_targets: length mismatch");
  const double bootstrap = terminated ? 0.0 : gamma;
  std::vector<double> y(r_ext.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = r_ext[i] + bootstrap * qbar[i];
    if (i < comps.size() && comps[i].clip_target) y[i] = clip_target(comps[i].sign, y[i]);
  }
  return y;
}

std::vector<double> critic_component_losses(const std::vector<std::vector<double>>& q1,
                                            const std::vector<std::vector<double>>& q2,
                                            const std::vector<std::vector<double>>& y,
                                            const std::vector<ComponentSpec>& comps) {
  if (q1.size() != y.size() || q2.size() != y.size())
    throw std::invalid_argument("critic_component_losses: row count mismatch");
  const std::size_t rows = y.size();
  if (rows == 0) throw std::invalid_argument("critic_component_losses: empty batch");
  const std::size_t n = y[0].size();
  std::vector<double> losses(n, 0.0);
  for (std::size_t b = 0; b < rows; ++b)
    for (std::size_t i = 0; i < n; ++i) {
      const double e1 = q1[b][i] - y[b][i];
      const double e2 = q2[b][i] - y[b][i];
      losses[i] += 0.5 * (e1 * e1 + e2 * e2);
      if (i < comps.size() && comps[i].penalty) {
        losses[i] += sign_penalty(comps[i].sign, q1[b][i]);
        losses[i] += sign_penalty(comps[i].sign, q2[b][i]);
      }
    }
  for (double& l : losses) l /= static_cast<double>(rows);
  return losses;
}

Trainer::Trainer(const EnvSpec& env_spec, VariantConfig cfg, std::vector<ComponentSpec> comps,
                 std::uint64_t seed)
    : env_spec_(env_spec),
      cfg_(std::move(cfg)),
      comps_(std::move(comps)),
      critic_(DecomposedCritic::make(
          env_spec.obs_dim, env_spec.action_dim,
          cfg_.variant == Variant::Sac ? 1 : env_spec.num_components() + 1, cfg_.hidden_sizes,
          seed * 4 + 1)),
      policy_(SquashedGaussianPolicy::make(env_spec.obs_dim, env_spec.action_dim,
                                           cfg_.hidden_sizes, seed * 4 + 3)),
      critic_opt_(critic_.online1.size() + critic_.online2.size()),
      policy_opt_(policy_.params.size()),
      alpha_opt_(1),
      log_alpha_(std::log(cfg_.init_alpha)),
      noise_rng_(make_stream(seed, Stream::PolicyNoise)) {
  if (static_cast<int>(comps_.size()) != env_spec.num_components())
    throw std::invalid_argument("Trainer: component spec count mismatch");
  for (const auto& c : comps_)
    if (!c.valid()) throw std::invalid_argument("Trainer: invalid component spec " + c.name);
}

double Trainer::alpha() const { return std::exp(log_alpha_); }

std::vector<double> Trainer::current_weights() const {
  const double t = static_cast<double>(gradient_steps_);
  std::vector<double> w;
  for (const auto& c : comps_) w.push_back(c.weight_at(t));
  if (decomposed()) w.push_back(1.0);  // entropy head is never down-weighted
  return w;
}

StepMetrics Trainer::update_step(const std::vector<Transition>& batch) {
  const std::size_t B = batch.size();
  if (B == 0) throw std::invalid_argument("update_step: empty batch");
  const int n = critic_.num_heads;
  const int m = env_spec_.num_components();
  const int d = env_spec_.action_dim;
  const double alpha_now = alpha();
  const std::vector<double> w = current_weights();
  const double inv_b = 1.0 / static_cast<double>(B);
  std::normal_distribution<double> normal(0.0, 1.0);

  StepMetrics metrics;
  metrics.step = gradient_steps_;
  metrics.weights = w;
  metrics.alpha = alpha_now;

  // --- Targets ---
  std::vector<std::vector<double>> y(B);
  for (std::size_t b = 0; b < B; ++b) {
    const Transition& t = batch[b];
    std::vector<double> noise(d);
    for (double& x : noise) x = normal(noise_rng_);
    const PolicySample next = sample_action(policy_, t.s_next, noise);
    const std::vector<double> qb1 = critic_.forward(critic_.target1, t.s_next, next.action);
    const std::vector<double> qb2 = critic_.forward(critic_.target2, t.s_next, next.action);
    if (cfg_.variant == Variant::Sac) {
      double r = 0.0;
      for (int i = 0; i < m; ++i) r += w[i] * t.r[i];
      const double qmin = std::min(qb1[0], qb2[0]);
      const double boot = t.terminated ? 0.0 : cfg_.gamma * (qmin - alpha_now * next.logp);
      y[b] = {r + boot};
    } else {
      std::vector<double> r_ext(t.r.begin(), t.r.end());
      r_ext.push_back(entropy_component_reward(next.logp, alpha_now, cfg_.gamma, t.terminated,
                                               cfg_.paper_literal_entropy_sign));
      std::vector<double> qbar(n);
      if (cfg_.variant == Variant::SacDNaive) {
        for (int i = 0; i < n; ++i) qbar[i] = std::min(qb1[i], qb2[i]);
      } else {
        const int j = select_target_network(qb1, qb2, w);
        qbar = (j == 0) ? qb1 : qb2;
      }
      y[b] = component_targets(r_ext, qbar, cfg_.gamma, t.terminated, comps_);
    }
  }

  // --- Critic losses and gradient ---
  const std::size_t P = critic_.online1.size();
  std::vector<std::vector<double>> qrows1(B), qrows2(B);
  std::vector<ForwardCache> caches1(B), caches2(B);
  for (std::size_t b = 0; b < B; ++b) {
    qrows1[b] = critic_.forward(critic_.online1, batch[b].s, batch[b].a, &caches1[b]);
    qrows2[b] = critic_.forward(critic_.online2, batch[b].s, batch[b].a, &caches2[b]);
  }
  metrics.component_losses = critic_component_losses(qrows1, qrows2, y, comps_);
  for (int i = 0; i < n; ++i)
    if (!std::isfinite(metrics.component_losses[i]))
      throw std::runtime_error(
          "update_step: non-finite critic loss in component '" +
          (i < m ? comps_[i].name : std::string("entropy")) + "'");

  std::vector<double> critic_grad(2 * P, 0.0);
  const bool use_cagrad = cfg_.variant == Variant::SacDCagrad;
  if (!use_cagrad) {
    // Mean of per-component losses in one backward pass per twin and row.
    const double scale = inv_b / static_cast<double>(n);
    std::vector<double> upstream(n);
    for (std::size_t b = 0; b < B; ++b) {
      for (int twin = 0; twin < 2; ++twin) {
        const auto& q = twin == 0 ? qrows1[b] : qrows2[b];
        const auto& cache = twin == 0 ? caches1[b] : caches2[b];
        const auto& params = twin == 0 ? critic_.online1 : critic_.online2;
        for (int i = 0; i < n; ++i) {
          double u = q[i] - y[b][i];
          if (i < m && comps_[i].penalty) u += sign_penalty_grad(comps_[i].sign, q[i]);
          upstream[i] = u * scale;
        }
        std::span<double> dst(critic_grad.data() + twin * P, P);
        mlp_backward(critic_.spec, params, cache, upstream, dst);
      }
    }
    if (cfg_.hidden_grad_division && cfg_.variant != Variant::Sac) {
      const int trunk = trunk_param_count(critic_.spec);
      for (int twin = 0; twin < 2; ++twin)
        for (int k = 0; k < trunk; ++k) critic_grad[twin * P + k] /= static_cast<double>(n);
    }
  } else {
    HeadGradients heads;
    heads.heads.assign(n, std::vector<double>(2 * P, 0.0));
    std::vector<double> upstream(n, 0.0);
    for (std::size_t b = 0; b < B; ++b) {
      for (int twin = 0; twin < 2; ++twin) {
        const auto& q = twin == 0 ? qrows1[b] : qrows2[b];
        const auto& cache = twin == 0 ? caches1[b] : caches2[b];
        const auto& params = twin == 0 ? critic_.online1 : critic_.online2;
        for (int i = 0; i < n; ++i) {
          double u = q[i] - y[b][i];
          if (i < m && comps_[i].penalty) u += sign_penalty_grad(comps_[i].sign, q[i]);
          upstream[i] = u * inv_b;
          std::span<double> dst(heads.heads[i].data() + twin * P, P);
          mlp_backward(critic_.spec, params, cache, upstream, dst);
          upstream[i] = 0.0;
        }
      }
    }
    const std::vector<double> wstar = cagrad_weights(heads, cfg_.cagrad_c);
    critic_grad = cfg_.original_cagrad_direction
                      ? cagrad_direction_original(heads, wstar, cfg_.cagrad_c)
                      : cagrad_direction(heads, wstar);
    metrics.cagrad_w = wstar;
  }

  {
    std::vector<double> both(critic_.online1);
    both.insert(both.end(), critic_.online2.begin(), critic_.online2.end());
    adam_step(both, critic_grad, critic_opt_, cfg_.lr_critic);
    std::copy(both.begin(), both.begin() + P, critic_.online1.begin());
    std::copy(both.begin() + P, both.end(), critic_.online2.begin());
  }
  for (double g : critic_grad) metrics.critic_grad_norm += g * g;
  metrics.critic_grad_norm = std::sqrt(metrics.critic_grad_norm);

  // --- Policy loss ---
  std::vector<double> policy_grad(policy_.params.size(), 0.0);
  double policy_loss = 0.0;
  double mean_logp = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const Transition& t = batch[b];
    std::vector<double> noise(d);
    for (double& x : noise) x = normal(noise_rng_);
    const PolicySample samp = sample_action(policy_, t.s, noise);
    mean_logp += samp.logp * inv_b;

    ForwardCache c1, c2;
    const std::vector<double> q1 = critic_.forward(critic_.online1, t.s, samp.action, &c1);
    const std::vector<double> q2 = critic_.forward(critic_.online2, t.s, samp.action, &c2);
    const std::vector<double> wq = decomposed() ? w : std::vector<double>{1.0};
    const double comp1 = composite_value(q1, wq);
    const double comp2 = composite_value(q2, wq);
    const bool first = comp1 <= comp2;
    policy_loss += (alpha_now * samp.logp - std::min(comp1, comp2)) * inv_b;

    // d(-composite)/d(action) through the chosen twin, params held fixed.
    std::vector<double> upstream(wq.size());
    for (std::size_t i = 0; i < wq.size(); ++i) upstream[i] = -wq[i] * inv_b;
    std::vector<double> scratch(critic_.online1.size(), 0.0);
    std::vector<double> grad_input;
    mlp_backward(critic_.spec, first ? critic_.online1 : critic_.online2, first ? c1 : c2,
                 upstream, scratch, &grad_input);
    std::vector<double> dact(grad_input.end() - d, grad_input.end());
    policy_backward(policy_, samp, alpha_now * inv_b, dact, policy_grad);
  }
  if (!std::isfinite(policy_loss)) throw std::runtime_error("update_step: non-finite policy loss");
  metrics.policy_loss = policy_loss;
  adam_step(policy_.params, policy_grad, policy_opt_, cfg_.lr_actor);
  for (double g : policy_grad) metrics.policy_grad_norm += g * g;
  metrics.policy_grad_norm = std::sqrt(metrics.policy_grad_norm);

  // --- Entropy temperature ---
  if (cfg_.adapt_alpha) {
    const double dlogalpha = -alpha_now * (mean_logp + cfg_.entropy_target);
    double la[1] = {log_alpha_};
    double g[1] = {dlogalpha};
    adam_step(la, g, alpha_opt_, cfg_.lr_actor);
    log_alpha_ = la[0];
  }

  // --- Target EMA ---
  for (std::size_t k = 0; k < P; ++k) {
    critic_.target1[k] = (1.0 - cfg_.eta) * critic_.target1[k] + cfg_.eta * critic_.online1[k];
    critic_.target2[k] = (1.0 - cfg_.eta) * critic_.target2[k] + cfg_.eta * critic_.online2[k];
  }

  gradient_steps_ += 1;
  metrics.alpha = alpha();
  return metrics;
}

}  // namespace sacd
