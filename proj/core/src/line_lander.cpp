#include "sacd/line_lander.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sacd {

LineLander::LineLander(LineLanderConfig cfg) : cfg_(cfg) {
  if (cfg_.landing_hold_steps < 1) throw std::invalid_argument("LineLander: H must be >= 1");
  if (!(cfg_.trace_normalizer > 0.0)) throw std::invalid_argument("LineLander: c must be > 0");
}

EnvSpec LineLander::spec() const {
  EnvSpec s;
  s.obs_dim = cfg_.include_v0_trace ? 3 : 2;
  s.action_dim = 1;
  s.component_names = {"landing", "crash", "main", "velocity"};
  s.default_weights = {1.0, 1.0, 1.0, 1.0};
  s.max_episode_steps = cfg_.max_episode_steps;
  return s;
}

std::vector<double> LineLander::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  h_ = std::uniform_real_distribution<double>(5.0, 10.0)(rng);
  v_ = 0.0;
  step_count_ = 0;
  rest_steps_ = 0;
  trace_steps_ = 0;
  on_ground_ = false;
  done_ = false;
  return observe();
}

std::vector<double> LineLander::observe() const {
  std::vector<double> obs = {h_, v_};
  if (cfg_.include_v0_trace) {
    const double capped = std::min(static_cast<double>(trace_steps_), 10.0 * cfg_.trace_normalizer);
    obs.push_back(capped / cfg_.trace_normalizer);
  }
  return obs;
}

DecomposedStepResult LineLander::step(std::span<const double> action) {
  if (done_) throw std::logic_error("LineLander::step: episode already ended");
  if (action.size() != 1) throw std::invalid_argument("LineLander::step: action_dim is 1");

  const double u = std::clamp(action[0], -1.0, 1.0);
  const double thrust = cfg_.max_thrust * 0.5 * (u + 1.0);

  DecomposedStepResult res;
  res.reward_components.assign(4, 0.0);
  double& landing = res.reward_components[0];
  double& crash = res.reward_components[1];
  double& main = res.reward_components[2];
  double& velocity = res.reward_components[3];

  main = -cfg_.fuel_cost_coeff * thrust;

  if (!on_ground_) {
    v_ += cfg_.dt * (thrust - cfg_.gravity);
    h_ += cfg_.dt * v_;
    velocity = -cfg_.velocity_shaping_coeff * std::abs(v_);
    if (h_ <= 0.0) {
      h_ = 0.0;
      if (std::abs(v_) > cfg_.crash_speed) {
        crash = cfg_.crash_penalty;
        res.terminated = true;
      } else {
        v_ = 0.0;  // soft touchdown, craft sticks
        on_ground_ = true;
      }
    }
  }
  // On the pad the state is frozen; only the hold counter advances.

  step_count_ += 1;

  if (!res.terminated) {
    if (std::abs(v_) < cfg_.velocity_zero_threshold)
      trace_steps_ += 1;
    else
      trace_steps_ = 0;
    if (on_ground_ && std::abs(v_) < cfg_.velocity_zero_threshold)
      rest_steps_ += 1;
    else
      rest_steps_ = 0;
    if (rest_steps_ > cfg_.landing_hold_steps) {
      landing = cfg_.landing_reward;
      res.terminated = true;
    }
  }

  if (!res.terminated && step_count_ >= cfg_.max_episode_steps) res.truncated = true;
  done_ = res.terminated || res.truncated;
  res.obs = observe();
  return res;
}

}  // namespace sacd
