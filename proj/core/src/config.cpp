#include "sacd/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include "sacd/checkpoint.hpp"

#include "sacd/gap_walker.hpp"
#include "sacd/line_lander.hpp"

namespace sacd {
namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
}

template <typename T>
void get_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

Sign sign_from_string(const std::string& s) {
  if (s == "free") return Sign::Free;
  if (s == "non_positive") return Sign::NonPositive;
  if (s == "non_negative") return Sign::NonNegative;
  throw std::invalid_argument("config: unknown sign '" + s + "'");
}

std::string sign_to_string(Sign s) {
  switch (s) {
    case Sign::Free: return "free";
    case Sign::NonPositive: return "non_positive";
    case Sign::NonNegative: return "non_negative";
  }
  throw std::invalid_argument("sign_to_string: bad sign");
}

LineLanderConfig line_lander_config(const json& o) {
  require_keys(o, {"gravity", "dt", "max_thrust", "fuel_cost_coeff", "crash_speed",
                   "crash_penalty", "landing_reward", "landing_hold_steps",
                   "velocity_shaping_coeff", "velocity_zero_threshold", "trace_normalizer",
                   "include_v0_trace", "max_episode_steps"},
               "environment overrides (line_lander)");
  LineLanderConfig c;
  get_if(o, "gravity", c.gravity);
  get_if(o, "dt", c.dt);
  get_if(o, "max_thrust", c.max_thrust);
  get_if(o, "fuel_cost_coeff", c.fuel_cost_coeff);
  get_if(o, "crash_speed", c.crash_speed);
  get_if(o, "crash_penalty", c.crash_penalty);
  get_if(o, "landing_reward", c.landing_reward);
  get_if(o, "landing_hold_steps", c.landing_hold_steps);
  get_if(o, "velocity_shaping_coeff", c.velocity_shaping_coeff);
  get_if(o, "velocity_zero_threshold", c.velocity_zero_threshold);
  get_if(o, "trace_normalizer", c.trace_normalizer);
  get_if(o, "include_v0_trace", c.include_v0_trace);
  get_if(o, "max_episode_steps", c.max_episode_steps);
  return c;
}

GapWalkerConfig gap_walker_config(const json& o) {
  require_keys(o, {"dt", "control_cost_coeff", "failure_penalty", "tilt_limit", "instability",
                   "drive_tilt_coupling", "max_episode_steps"},
               "environment overrides (gap_walker)");
  GapWalkerConfig c;
  get_if(o, "dt", c.dt);
  get_if(o, "control_cost_coeff", c.control_cost_coeff);
  get_if(o, "failure_penalty", c.failure_penalty);
  get_if(o, "tilt_limit", c.tilt_limit);
  get_if(o, "instability", c.instability);
  get_if(o, "drive_tilt_coupling", c.drive_tilt_coupling);
  get_if(o, "max_episode_steps", c.max_episode_steps);
  return c;
}

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name, const json& overrides) {
  if (name == "line_lander") return std::make_unique<LineLander>(line_lander_config(overrides));
  if (name == "gap_walker") return std::make_unique<GapWalker>(gap_walker_config(overrides));
  throw std::invalid_argument("config: unknown environment '" + name + "'");
}

std::unique_ptr<Env> make_env(const RunConfig& cfg) {
  return make_env(cfg.environment, cfg.env_overrides);
}

std::vector<ComponentSpec> default_components(const EnvSpec& spec) {
  std::vector<ComponentSpec> comps;
  for (std::size_t i = 0; i < spec.component_names.size(); ++i) {
    ComponentSpec c;
    c.name = spec.component_names[i];
    c.weight = spec.default_weights[i];
    comps.push_back(std::move(c));
  }
  return comps;
}

RunConfig parse_run_config(const json& j) {
  require_keys(j,
               {"environment", "env_overrides", "variant", "gamma", "lr_actor", "lr_critic",
                "batch_size", "eta", "entropy_target", "adapt_alpha", "init_alpha", "cagrad_c",
                "hidden_grad_division", "paper_literal_entropy_sign", "original_cagrad_direction",
                "hidden_sizes", "components", "total_steps", "buffer_capacity", "warmup_steps",
                "log_every", "checkpoint_every", "eval", "seed"},
               "run config");
  RunConfig cfg;
  cfg.environment = j.at("environment").get<std::string>();
  if (j.contains("env_overrides")) cfg.env_overrides = j.at("env_overrides");

  auto env = make_env(cfg.environment, cfg.env_overrides);
  const EnvSpec espec = env->spec();

  cfg.variant.variant = variant_from_string(j.value("variant", std::string("SAC-D")));
  cfg.variant.entropy_target = -static_cast<double>(espec.action_dim);
  get_if(j, "gamma", cfg.variant.gamma);
  get_if(j, "lr_actor", cfg.variant.lr_actor);
  get_if(j, "lr_critic", cfg.variant.lr_critic);
  get_if(j, "batch_size", cfg.variant.batch_size);
  get_if(j, "eta", cfg.variant.eta);
  get_if(j, "entropy_target", cfg.variant.entropy_target);
  get_if(j, "adapt_alpha", cfg.variant.adapt_alpha);
  get_if(j, "init_alpha", cfg.variant.init_alpha);
  get_if(j, "cagrad_c", cfg.variant.cagrad_c);
  get_if(j, "hidden_grad_division", cfg.variant.hidden_grad_division);
  get_if(j, "paper_literal_entropy_sign", cfg.variant.paper_literal_entropy_sign);
  get_if(j, "original_cagrad_direction", cfg.variant.original_cagrad_direction);
  get_if(j, "hidden_sizes", cfg.variant.hidden_sizes);
  if (!(cfg.variant.gamma > 0.0 && cfg.variant.gamma < 1.0))
    throw std::invalid_argument("config: gamma must be in (0,1)");
  if (!(cfg.variant.eta > 0.0 && cfg.variant.eta <= 1.0))
    throw std::invalid_argument("config: eta must be in (0,1]");

  cfg.components = default_components(espec);
  if (j.contains("components")) {
    for (const auto& cj : j.at("components")) {
      require_keys(cj, {"name", "weight", "sign", "clip_target", "penalty", "schedule"},
                   "component spec");
      const std::string name = cj.at("name").get<std::string>();
      auto it = std::find_if(cfg.components.begin(), cfg.components.end(),
                             [&](const ComponentSpec& c) { return c.name == name; });
      if (it == cfg.components.end())
        throw std::invalid_argument("config: component '" + name + "' not in environment '" +
                                    cfg.environment + "'");
      get_if(cj, "weight", it->weight);
      if (cj.contains("sign")) it->sign = sign_from_string(cj.at("sign").get<std::string>());
      get_if(cj, "clip_target", it->clip_target);
      get_if(cj, "penalty", it->penalty);
      if (cj.contains("schedule")) {
        const json& sj = cj.at("schedule");
        require_keys(sj, {"tau_warmup", "beta", "floor_weight"}, "schedule");
        WeightSchedule ws;
        get_if(sj, "tau_warmup", ws.tau_warmup);
        get_if(sj, "beta", ws.beta);
        get_if(sj, "floor_weight", ws.floor_weight);
        it->schedule = ws;
      }
      if (!it->valid())
        throw std::invalid_argument("config: invalid component spec for '" + name + "'");
    }
  }

  get_if(j, "total_steps", cfg.total_steps);
  get_if(j, "buffer_capacity", cfg.buffer_capacity);
  get_if(j, "warmup_steps", cfg.warmup_steps);
  get_if(j, "log_every", cfg.log_every);
  get_if(j, "checkpoint_every", cfg.checkpoint_every);
  if (j.contains("eval")) {
    const json& ej = j.at("eval");
    require_keys(ej, {"episodes", "every", "probe_states"}, "eval");
    get_if(ej, "episodes", cfg.eval.episodes);
    get_if(ej, "every", cfg.eval.every);
    get_if(ej, "probe_states", cfg.eval.probe_states);
  }
  get_if(j, "seed", cfg.seed);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: parse error in " + path + ": " + e.what());
  }
  return parse_run_config(j);
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["environment"] = cfg.environment;
  j["env_overrides"] = cfg.env_overrides;
  j["variant"] = to_string(cfg.variant.variant);
  j["gamma"] = cfg.variant.gamma;
  j["lr_actor"] = cfg.variant.lr_actor;
  j["lr_critic"] = cfg.variant.lr_critic;
  j["batch_size"] = cfg.variant.batch_size;
  j["eta"] = cfg.variant.eta;
  j["entropy_target"] = cfg.variant.entropy_target;
  j["adapt_alpha"] = cfg.variant.adapt_alpha;
  j["init_alpha"] = cfg.variant.init_alpha;
  j["cagrad_c"] = cfg.variant.cagrad_c;
  j["hidden_grad_division"] = cfg.variant.hidden_grad_division;
  j["paper_literal_entropy_sign"] = cfg.variant.paper_literal_entropy_sign;
  j["original_cagrad_direction"] = cfg.variant.original_cagrad_direction;
  j["hidden_sizes"] = cfg.variant.hidden_sizes;
  json comps = json::array();
  for (const auto& c : cfg.components) {
    json cj;
    cj["name"] = c.name;
    cj["weight"] = c.weight;
    cj["sign"] = sign_to_string(c.sign);
    cj["clip_target"] = c.clip_target;
    cj["penalty"] = c.penalty;
    if (c.schedule) {
      cj["schedule"] = {{"tau_warmup", c.schedule->tau_warmup},
                        {"beta", c.schedule->beta},
                        {"floor_weight", c.schedule->floor_weight}};
    }
    comps.push_back(cj);
  }
  j["components"] = comps;
  j["total_steps"] = cfg.total_steps;
  j["buffer_capacity"] = cfg.buffer_capacity;
  j["warmup_steps"] = cfg.warmup_steps;
  j["log_every"] = cfg.log_every;
  j["checkpoint_every"] = cfg.checkpoint_every;
  j["eval"] = {{"episodes", cfg.eval.episodes},
               {"every", cfg.eval.every},
               {"probe_states", cfg.eval.probe_states}};
  j["seed"] = cfg.seed;
  return j;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a64(run_config_to_json(cfg).dump());
}

}  // namespace sacd
