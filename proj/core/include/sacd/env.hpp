#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sacd {

struct EnvSpec {
  int obs_dim = 1;
  int action_dim = 1;
  std::vector<std::string> component_names;
  std::vector<double> default_weights;  // all 1.0
  int max_episode_steps = 1000;

  int num_components() const { return static_cast<int>(component_names.size()); }
};

struct DecomposedStepResult {
  std::vector<double> obs;
  std::vector<double> reward_components;
  bool terminated = false;  // environmental end; no bootstrap
  bool truncated = false;   // timeout; bootstrap
};

class Env {
 public:
  virtual ~Env() = default;
  virtual EnvSpec spec() const = 0;
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  virtual DecomposedStepResult step(std::span<const double> action) = 0;
};

}  // namespace sacd
