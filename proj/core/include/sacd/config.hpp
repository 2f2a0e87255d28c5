#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sacd/env.hpp"
#include "sacd/shaping.hpp"
#include "sacd/trainer.hpp"

namespace sacd {

struct EvalConfig {
  int episodes = 10;
  int every = 1000;       // gradient steps between evaluations
  int probe_states = 64;  // replay samples for influence probes
};

/// Everything a training run needs; the JSON snapshot of this struct fully
/// determines the run.
struct RunConfig {
  std::string environment;  // "line_lander" | "gap_walker"
  nlohmann::json env_overrides = nlohmann::json::object();
  VariantConfig variant;
  std::vector<ComponentSpec> components;  // environmental components
  std::int64_t total_steps = 0;
  std::size_t buffer_capacity = 1000000;
  int warmup_steps = 1000;
  int log_every = 100;
  int checkpoint_every = 0;  // 0 = final only
  EvalConfig eval;
  std::uint64_t seed = 0;
};

/// Strict parser: unknown keys anywhere are rejected, component names are
/// validated against the environment.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

nlohmann::json run_config_to_json(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);

std::unique_ptr<Env> make_env(const std::string& name, const nlohmann::json& overrides);
std::unique_ptr<Env> make_env(const RunConfig& cfg);

/// Default per-component specs (all weight 1, unconstrained) for an env.
std::vector<ComponentSpec> default_components(const EnvSpec& spec);

}  // namespace sacd
