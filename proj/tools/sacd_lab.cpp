// Operator CLI: train runs, evaluate checkpoints, export analysis CSVs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "sacd/analysis.hpp"
#include "sacd/config.hpp"
#include "sacd/rng.hpp"
#include "sacd/run.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Per-component predictions from the min-composite twin at (s, a).
sacd::Predictor critic_predictor(const sacd::Trainer& trainer, std::vector<double> weights) {
  const sacd::DecomposedCritic& critic = trainer.critic();
  return [&critic, w = std::move(weights)](std::span<const double> s, std::span<const double> a) {
    const std::vector<double> q1 = critic.forward(critic.online1, s, a);
    const std::vector<double> q2 = critic.forward(critic.online2, s, a);
    return sacd::composite_value(q1, w) <= sacd::composite_value(q2, w) ? q1 : q2;
  };
}

std::vector<std::string> head_names(const sacd::EnvSpec& spec) {
  std::vector<std::string> names = spec.component_names;
  names.push_back("entropy");
  return names;
}

int cmd_train(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed) {
  sacd::RunConfig cfg = sacd::load_run_config(config_path);
  if (seed) cfg.seed = *seed;
  sacd::train_run(cfg, out_dir);
  std::cout << "run written to " << out_dir << "\n";
  return 0;
}

int cmd_evaluate(const std::string& checkpoint, int episodes, std::uint64_t seed,
                 const std::string& out_dir, std::string config_path) {
  if (config_path.empty()) config_path = (fs::path(checkpoint).parent_path() / "config.json").string();
  sacd::LoadedRun run = sacd::load_run(config_path, checkpoint);
  const sacd::EvalResult result = sacd::evaluate_policy(
      *run.env, run.trainer->policy(), run.config.components, episodes, seed);

  fs::create_directories(out_dir);
  std::vector<std::string> header = result.component_names;
  header.push_back("composite");
  std::vector<std::vector<double>> rows;
  for (std::size_t e = 0; e < result.per_episode_returns.size(); ++e) {
    std::vector<double> row = result.per_episode_returns[e];
    row.push_back(result.composites[e]);
    rows.push_back(std::move(row));
  }
  const fs::path out = fs::path(out_dir) / "evaluation.csv";
  sacd::write_csv(out, header, rows);
  std::cout << out.string() << "\n";
  return 0;
}

int analyze_influence_trajectory(sacd::LoadedRun& run, std::uint64_t seed,
                                 const fs::path& out_dir) {
  const sacd::Episode ep = sacd::run_eval_episode(*run.env, run.trainer->policy(), seed);
  const std::vector<double> w = run.trainer->current_weights();
  std::vector<std::string> header = head_names(run.env->spec());
  header.push_back("degenerate");
  std::vector<std::vector<double>> rows;
  for (const auto& s : ep.states) {
    const sacd::InfluenceSample inf =
        sacd::influence(s, run.trainer->critic(), run.trainer->policy(), w);
    std::vector<double> row = inf.fractional;
    row.push_back(inf.degenerate ? 1.0 : 0.0);
    rows.push_back(std::move(row));
  }
  const fs::path out = out_dir / "influence_trajectory.csv";
  sacd::write_csv(out, header, rows);
  std::cout << out.string() << "\n";
  return 0;
}

int analyze_influence_summary(const fs::path& run_dir, const fs::path& out_dir) {
  std::ifstream in(run_dir / "metrics.jsonl");
  if (!in) throw std::runtime_error("analyze: expected metric log at " +
                                    (run_dir / "metrics.jsonl").string());
  std::vector<std::pair<std::int64_t, std::vector<double>>> snapshots;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    if (rec.contains("influence_mean"))
      snapshots.emplace_back(rec.at("step").get<std::int64_t>(),
                             rec.at("influence_mean").get<std::vector<double>>());
  }
  const sacd::InfluenceSummary summary = sacd::influence_training_summary(snapshots);

  sacd::RunConfig cfg = sacd::load_run_config((run_dir / "config.json").string());
  auto env = sacd::make_env(cfg);
  const std::vector<std::string> names = head_names(env->spec());
  std::vector<std::string> header = {"step"};
  for (int idx : summary.order) header.push_back(names[idx]);
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < summary.rows.size(); ++k) {
    std::vector<double> row = {static_cast<double>(summary.steps[k])};
    row.insert(row.end(), summary.rows[k].begin(), summary.rows[k].end());
    rows.push_back(std::move(row));
  }
  const fs::path out = out_dir / "influence_summary.csv";
  sacd::write_csv(out, header, rows);
  std::cout << out.string() << "\n";
  return 0;
}

int analyze_accuracy(sacd::LoadedRun& run, int episodes, int window, std::uint64_t seed,
                     const fs::path& out_dir) {
  std::mt19937_64 seeds = sacd::make_stream(seed, sacd::Stream::EvalEnv);
  std::vector<sacd::Episode> eps;
  for (int e = 0; e < episodes; ++e)
    eps.push_back(sacd::run_eval_episode(*run.env, run.trainer->policy(), seeds()));
  const std::vector<double> w = run.trainer->current_weights();
  const sacd::AccuracyReport report = sacd::prediction_accuracy(
      eps, critic_predictor(*run.trainer, w), run.config.variant.gamma, window);

  const std::vector<std::string> names = run.env->spec().component_names;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < names.size(); ++i)
    rows.push_back({static_cast<double>(i), report.iqm_rmse[i], report.iqm_correlation[i],
                    report.correlation_flagged[i] ? 1.0 : 0.0});
  const fs::path out = out_dir / "accuracy.csv";
  sacd::write_csv(out, {"component", "iqm_rmse", "iqm_correlation", "correlation_flagged"}, rows);
  std::cout << out.string() << "\n";
  std::cout << "trajectories used: " << report.trajectories_used
            << ", skipped: " << report.trajectories_skipped << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Value-decomposed soft actor-critic laboratory"};
  app.require_subcommand(1);

  std::string output_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--output-dir", output_dir, "Directory for run artifacts")->capture_default_str();
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { seed = s; seed_set = true; }, "Root seed override");

  auto* train = app.add_subcommand("train", "Train per a run config file");
  std::string config_path;
  train->add_option("--config", config_path, "Run config (JSON)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a checkpoint deterministically");
  std::string checkpoint, eval_config;
  int episodes = 10;
  evaluate->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  evaluate->add_option("--episodes", episodes, "Episode count")->capture_default_str();
  evaluate->add_option("--config", eval_config, "Config snapshot (defaults to sibling config.json)");

  auto* analyze = app.add_subcommand("analyze", "Export analysis CSVs");
  std::string mode, input, analyze_config;
  int window = 25;
  int analyze_episodes = 200;
  analyze->add_option("--mode", mode, "influence-trajectory | influence-summary | returns-vs-predictions")
      ->required();
  analyze->add_option("--input", input, "Checkpoint (or run directory for influence-summary)")
      ->required();
  analyze->add_option("--config", analyze_config, "Config snapshot override");
  analyze->add_option("--window", window, "Last-K window for accuracy")->capture_default_str();
  analyze->add_option("--episodes", analyze_episodes, "Episodes for returns-vs-predictions")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, output_dir, seed_set ? std::optional(seed) : std::nullopt);
    if (*evaluate) return cmd_evaluate(checkpoint, episodes, seed, output_dir, eval_config);
    if (*analyze) {
      fs::create_directories(output_dir);
      if (mode == "influence-summary") return analyze_influence_summary(input, output_dir);
      if (analyze_config.empty())
        analyze_config = (fs::path(input).parent_path() / "config.json").string();
      sacd::LoadedRun run = sacd::load_run(analyze_config, input);
      if (mode == "influence-trajectory")
        return analyze_influence_trajectory(run, seed, output_dir);
      if (mode == "returns-vs-predictions")
        return analyze_accuracy(run, analyze_episodes, window, seed, output_dir);
      throw std::invalid_argument("analyze: unknown mode '" + mode + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
