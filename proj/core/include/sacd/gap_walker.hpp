#pragma once

#include "sacd/env.hpp"

namespace sacd {

/// 1-D walker with an unstable tilt. Driving forward earns reward but feeds
/// the tilt; crossing the tilt limit is a terminal failure with a large
/// penalty, so a random policy fails in most episodes.
struct GapWalkerConfig {
  double dt = 0.1;
  double control_cost_coeff = 0.01;
  double failure_penalty = -100.0;
  double tilt_limit = 1.0;
  double instability = 0.5;          // positive feedback on tilt
  double drive_tilt_coupling = 0.5;  // drive action destabilizes
  int max_episode_steps = 200;
};

/// Components: forward (dx per step), control (<= 0), failure (<= 0).
class GapWalker final : public Env {
 public:
  explicit GapWalker(GapWalkerConfig cfg = {});

  EnvSpec spec() const override;
  std::vector<double> reset(std::uint64_t seed) override;
  DecomposedStepResult step(std::span<const double> action) override;

  double position() const { return x_; }
  double tilt() const { return tilt_; }

 private:
  GapWalkerConfig cfg_;
  double x_ = 0.0;
  double tilt_ = 0.0;
  int step_count_ = 0;
  bool done_ = false;
};

}  // namespace sacd
