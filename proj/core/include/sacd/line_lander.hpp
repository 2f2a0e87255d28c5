#pragma once

#include "sacd/env.hpp"

namespace sacd {

/// 1-D powered-descent lander. The simulator only grants the landing reward
/// after the craft has been at rest on the pad for H consecutive steps,
/// during which the plain (h, v) observation is frozen; the optional
/// zero-velocity trace feature restores the Markov property.
struct LineLanderConfig {
  double gravity = 1.0;
  double dt = 0.1;
  double max_thrust = 2.0;
  double fuel_cost_coeff = 0.05;
  double crash_speed = 1.0;
  double crash_penalty = -100.0;
  double landing_reward = 100.0;
  int landing_hold_steps = 20;  // H
  double velocity_shaping_coeff = 0.1;
  double velocity_zero_threshold = 1e-3;
  double trace_normalizer = 40.0;  // c
  bool include_v0_trace = false;
  int max_episode_steps = 1000;
};

/// Components: landing (>= 0), crash (<= 0), main/fuel (<= 0), velocity (<= 0).
class LineLander final : public Env {
 public:
  explicit LineLander(LineLanderConfig cfg = {});

  EnvSpec spec() const override;
  std::vector<double> reset(std::uint64_t seed) override;
  DecomposedStepResult step(std::span<const double> action) override;

  // Exposed for tests.
  double height() const { return h_; }
  double velocity() const { return v_; }
  int rest_steps() const { return rest_steps_; }

 private:
  std::vector<double> observe() const;

  LineLanderConfig cfg_;
  double h_ = 0.0;
  double v_ = 0.0;
  int step_count_ = 0;
  int rest_steps_ = 0;       // consecutive at-rest-on-pad steps
  int trace_steps_ = 0;      // consecutive near-zero-velocity steps
  bool on_ground_ = false;
  bool done_ = false;
};

}  // namespace sacd
