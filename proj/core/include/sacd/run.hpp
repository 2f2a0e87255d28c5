#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sacd/analysis.hpp"
#include "sacd/checkpoint.hpp"
#include "sacd/config.hpp"
#include "sacd/trainer.hpp"

namespace sacd {

/// Runs training per the config, writing config.json, metrics.jsonl,
/// timing.jsonl and checkpoints into out_dir. Fully deterministic given
/// the config (timing.jsonl aside).
void train_run(const RunConfig& cfg, const std::filesystem::path& out_dir);

Checkpoint trainer_to_checkpoint(Trainer& trainer, std::uint64_t cfg_hash);
void checkpoint_to_trainer(const Checkpoint& ckpt, Trainer& trainer);

/// One deterministic-action episode.
Episode run_eval_episode(Env& env, const SquashedGaussianPolicy& policy, std::uint64_t seed);

struct EvalResult {
  std::vector<std::string> component_names;
  std::vector<std::vector<double>> per_episode_returns;  // [episode][component]
  std::vector<double> composites;                        // weighted row sums
};

EvalResult evaluate_policy(Env& env, const SquashedGaussianPolicy& policy,
                           const std::vector<ComponentSpec>& comps, int episodes,
                           std::uint64_t seed);

/// Rebuilds a trainer (networks + optimizer states) from a run directory's
/// config snapshot and a checkpoint file.
struct LoadedRun {
  RunConfig config;
  std::unique_ptr<Env> env;
  std::unique_ptr<Trainer> trainer;
};

LoadedRun load_run(const std::filesystem::path& config_path,
                   const std::filesystem::path& checkpoint_path);

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace sacd
