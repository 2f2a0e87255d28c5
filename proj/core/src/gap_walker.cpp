#include "sacd/gap_walker.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sacd {

GapWalker::GapWalker(GapWalkerConfig cfg) : cfg_(cfg) {
  if (!(cfg_.failure_penalty < 0.0)) throw std::invalid_argument("GapWalker: failure must be negative");
}

EnvSpec GapWalker::spec() const {
  EnvSpec s;
  s.obs_dim = 2;
  s.action_dim = 2;  // (drive, balance)
  s.component_names = {"forward", "control", "failure"};
  s.default_weights = {1.0, 1.0, 1.0};
  s.max_episode_steps = cfg_.max_episode_steps;
  return s;
}

std::vector<double> GapWalker::reset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  x_ = std::uniform_real_distribution<double>(-0.1, 0.1)(rng);
  tilt_ = 0.0;
  step_count_ = 0;
  done_ = false;
  return {x_, tilt_};
}

DecomposedStepResult GapWalker::step(std::span<const double> action) {
  if (done_) throw std::logic_error("GapWalker::step: episode already ended");
  if (action.size() != 2) throw std::invalid_argument("GapWalker::step: action_dim is 2");

  const double drive = std::clamp(action[0], -1.0, 1.0);
  const double balance = std::clamp(action[1], -1.0, 1.0);

  const double dx = cfg_.dt * drive;
  x_ += dx;
  tilt_ += cfg_.dt * (cfg_.instability * tilt_ + cfg_.drive_tilt_coupling * drive + balance);

  DecomposedStepResult res;
  res.reward_components = {dx, -cfg_.control_cost_coeff * (drive * drive + balance * balance), 0.0};

  step_count_ += 1;
  if (std::abs(tilt_) >= cfg_.tilt_limit) {
    res.reward_components[2] = cfg_.failure_penalty;
    res.terminated = true;
  } else if (step_count_ >= cfg_.max_episode_steps) {
    res.truncated = true;
  }
  done_ = res.terminated || res.truncated;
  res.obs = {x_, tilt_};
  return res;
}

}  // namespace sacd
