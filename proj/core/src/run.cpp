#include "sacd/run.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "sacd/rng.hpp"

namespace sacd {
namespace {

using nlohmann::json;

Transition make_transition(const std::vector<double>& s, const std::vector<double>& a,
                           const DecomposedStepResult& res) {
  Transition t;
  t.s = s;
  t.a = a;
  t.r = res.reward_components;
  t.s_next = res.obs;
  t.terminated = res.terminated;
  return t;
}

}  // namespace

Checkpoint trainer_to_checkpoint(Trainer& trainer, std::uint64_t cfg_hash) {
  Checkpoint c;
  c.config_hash = cfg_hash;
  c.step = trainer.gradient_steps();
  const DecomposedCritic& critic = trainer.critic();
  c.add("critic_online1", critic.online1);
  c.add("critic_online2", critic.online2);
  c.add("critic_target1", critic.target1);
  c.add("critic_target2", critic.target2);
  c.add("policy_params", trainer.policy().params);
  c.add("critic_adam_m", trainer.critic_opt().m);
  c.add("critic_adam_v", trainer.critic_opt().v);
  c.add("policy_adam_m", trainer.policy_opt().m);
  c.add("policy_adam_v", trainer.policy_opt().v);
  c.add("alpha_adam_m", trainer.alpha_opt().m);
  c.add("alpha_adam_v", trainer.alpha_opt().v);
  c.add("scalars", {trainer.log_alpha(), static_cast<double>(trainer.critic_opt().t),
                    static_cast<double>(trainer.policy_opt().t),
                    static_cast<double>(trainer.alpha_opt().t),
                    static_cast<double>(trainer.gradient_steps())});
  return c;
}

void checkpoint_to_trainer(const Checkpoint& ckpt, Trainer& trainer) {
  DecomposedCritic& critic = trainer.critic();
  critic.online1 = ckpt.get("critic_online1");
  critic.online2 = ckpt.get("critic_online2");
  critic.target1 = ckpt.get("critic_target1");
  critic.target2 = ckpt.get("critic_target2");
  trainer.policy().params = ckpt.get("policy_params");
  trainer.critic_opt().m = ckpt.get("critic_adam_m");
  trainer.critic_opt().v = ckpt.get("critic_adam_v");
  trainer.policy_opt().m = ckpt.get("policy_adam_m");
  trainer.policy_opt().v = ckpt.get("policy_adam_v");
  trainer.alpha_opt().m = ckpt.get("alpha_adam_m");
  trainer.alpha_opt().v = ckpt.get("alpha_adam_v");
  const std::vector<double>& s = ckpt.get("scalars");
  trainer.log_alpha() = s[0];
  trainer.critic_opt().t = static_cast<std::int64_t>(s[1]);
  trainer.policy_opt().t = static_cast<std::int64_t>(s[2]);
  trainer.alpha_opt().t = static_cast<std::int64_t>(s[3]);
  trainer.gradient_steps() = static_cast<std::int64_t>(s[4]);
}

Episode run_eval_episode(Env& env, const SquashedGaussianPolicy& policy, std::uint64_t seed) {
  Episode ep;
  std::vector<double> obs = env.reset(seed);
  const int max_steps = env.spec().max_episode_steps;
  for (int t = 0; t < max_steps; ++t) {
    const std::vector<double> a = deterministic_action(policy, obs);
    const DecomposedStepResult res = env.step(a);
    ep.states.push_back(obs);
    ep.actions.push_back(a);
    ep.rewards.push_back(res.reward_components);
    obs = res.obs;
    if (res.terminated || res.truncated) {
      ep.terminated = res.terminated;
      break;
    }
  }
  return ep;
}

EvalResult evaluate_policy(Env& env, const SquashedGaussianPolicy& policy,
                           const std::vector<ComponentSpec>& comps, int episodes,
                           std::uint64_t seed) {
  EvalResult result;
  result.component_names = env.spec().component_names;
  std::mt19937_64 seeds = make_stream(seed, Stream::EvalEnv);
  for (int e = 0; e < episodes; ++e) {
    const Episode ep = run_eval_episode(env, policy, seeds());
    std::vector<double> totals(result.component_names.size(), 0.0);
    for (const auto& r : ep.rewards)
      for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += r[i];
    double composite = 0.0;
    for (std::size_t i = 0; i < totals.size(); ++i) composite += comps[i].weight * totals[i];
    result.per_episode_returns.push_back(std::move(totals));
    result.composites.push_back(composite);
  }
  return result;
}

void train_run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const std::uint64_t hash = config_hash(cfg);
  {
    std::ofstream out(out_dir / "config.json", std::ios::trunc);
    out << run_config_to_json(cfg).dump(2) << "\n";
  }

  auto env = make_env(cfg);
  const EnvSpec espec = env->spec();
  Trainer trainer(espec, cfg.variant, cfg.components, cfg.seed);
  ReplayBuffer buffer(cfg.buffer_capacity, espec.num_components());

  save_checkpoint(trainer_to_checkpoint(trainer, hash), out_dir / "ckpt_initial.bin");

  std::ofstream metrics_out(out_dir / "metrics.jsonl", std::ios::trunc);
  std::ofstream timing_out(out_dir / "timing.jsonl", std::ios::trunc);
  const auto t0 = std::chrono::steady_clock::now();

  std::mt19937_64 env_seeds = make_stream(cfg.seed, Stream::EnvInit);
  std::mt19937_64 warmup_rng = make_stream(cfg.seed, Stream::Warmup);
  std::mt19937_64 explore_rng = make_stream(cfg.seed, Stream::Exploration);
  std::mt19937_64 replay_rng = make_stream(cfg.seed, Stream::ReplaySample);
  std::mt19937_64 probe_rng = make_stream(cfg.seed, Stream::ProbeStates);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform_action(-1.0, 1.0);

  std::vector<double> obs = env->reset(env_seeds());

  for (int i = 0; i < cfg.warmup_steps; ++i) {
    std::vector<double> a(espec.action_dim);
    for (double& x : a) x = uniform_action(warmup_rng);
    const DecomposedStepResult res = env->step(a);
    buffer.push(make_transition(obs, a, res));
    obs = res.obs;
    if (res.terminated || res.truncated) obs = env->reset(env_seeds());
  }

  auto eval_env = make_env(cfg);
  while (trainer.gradient_steps() < cfg.total_steps) {
    std::vector<double> noise(espec.action_dim);
    for (double& x : noise) x = normal(explore_rng);
    const PolicySample samp = sample_action(trainer.policy(), obs, noise);
    const DecomposedStepResult res = env->step(samp.action);
    buffer.push(make_transition(obs, samp.action, res));
    obs = res.obs;
    if (res.terminated || res.truncated) obs = env->reset(env_seeds());

    if (buffer.size() < static_cast<std::size_t>(cfg.variant.batch_size)) continue;
    const std::vector<Transition> batch = buffer.sample(cfg.variant.batch_size, replay_rng);
    const StepMetrics sm = trainer.update_step(batch);
    const std::int64_t done = trainer.gradient_steps();

    const bool log_now = cfg.log_every > 0 && done % cfg.log_every == 0;
    const bool eval_now = cfg.eval.every > 0 && done % cfg.eval.every == 0;
    if (log_now || eval_now || done == cfg.total_steps) {
      json rec;
      rec["step"] = done;
      rec["alpha"] = sm.alpha;
      rec["policy_loss"] = sm.policy_loss;
      rec["component_losses"] = sm.component_losses;
      rec["weights"] = sm.weights;
      rec["critic_grad_norm"] = sm.critic_grad_norm;
      rec["policy_grad_norm"] = sm.policy_grad_norm;
      if (!sm.cagrad_w.empty()) rec["cagrad_w"] = sm.cagrad_w;
      if (eval_now) {
        const EvalResult er =
            evaluate_policy(*eval_env, trainer.policy(), cfg.components, cfg.eval.episodes,
                            cfg.seed + static_cast<std::uint64_t>(done));
        std::vector<double> mean_returns(espec.num_components(), 0.0);
        for (const auto& row : er.per_episode_returns)
          for (std::size_t i = 0; i < mean_returns.size(); ++i)
            mean_returns[i] += row[i] / er.per_episode_returns.size();
        double mean_composite = 0.0;
        for (double cmp : er.composites) mean_composite += cmp / er.composites.size();
        rec["eval_returns"] = mean_returns;
        rec["eval_composite"] = mean_composite;
        if (trainer.decomposed()) {
          const std::vector<double> w = trainer.current_weights();
          const std::vector<Transition> probes = buffer.sample(cfg.eval.probe_states, probe_rng);
          std::vector<double> mean_frac(trainer.num_heads(), 0.0);
          int degenerate = 0, valid = 0;
          for (const Transition& p : probes) {
            const InfluenceSample inf = influence(p.s, trainer.critic(), trainer.policy(), w);
            if (inf.degenerate) {
              degenerate += 1;
              continue;
            }
            valid += 1;
            for (int i = 0; i < trainer.num_heads(); ++i) mean_frac[i] += inf.fractional[i];
          }
          if (valid > 0)
            for (double& x : mean_frac) x /= static_cast<double>(valid);
          rec["influence_mean"] = mean_frac;
          rec["influence_degenerate_probes"] = degenerate;
        }
      }
      metrics_out << rec.dump() << "\n";
      metrics_out.flush();
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
      timing_out << json{{"step", done}, {"wall_ms", ms}}.dump() << "\n";
      timing_out.flush();
    }
    if (cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0)
      save_checkpoint(trainer_to_checkpoint(trainer, hash),
                      out_dir / ("ckpt_" + std::to_string(done) + ".bin"));
  }

  if (cfg.total_steps > 0)
    save_checkpoint(trainer_to_checkpoint(trainer, hash), out_dir / "ckpt_final.bin");
}

LoadedRun load_run(const std::filesystem::path& config_path,
                   const std::filesystem::path& checkpoint_path) {
  LoadedRun lr;
  lr.config = load_run_config(config_path.string());
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  if (ckpt.config_hash != config_hash(lr.config))
    throw std::runtime_error("load_run: checkpoint " + checkpoint_path.string() +
                             " does not match config " + config_path.string());
  lr.env = make_env(lr.config);
  lr.trainer = std::make_unique<Trainer>(lr.env->spec(), lr.config.variant, lr.config.components,
                                         lr.config.seed);
  checkpoint_to_trainer(ckpt, *lr.trainer);
  return lr;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out << (i ? "," : "") << header[i];
  out << "\r\n";
  char buf[32];
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\r\n";
  }
}

}  // namespace sacd
