#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sacd/checkpoint.hpp"
#include "sacd/config.hpp"
#include "sacd/run.hpp"

using namespace sacd;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "sacd_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Tiny gap_walker run that still exercises eval, influence probes and
// periodic checkpoints.
json small_run_json(std::uint64_t seed) {
  json j;
  j["environment"] = "gap_walker";
  j["env_overrides"] = {{"max_episode_steps", 40}};
  j["variant"] = "SAC-D";
  j["hidden_sizes"] = {8, 8};
  j["batch_size"] = 8;
  j["total_steps"] = 30;
  j["warmup_steps"] = 40;
  j["buffer_capacity"] = 500;
  j["log_every"] = 10;
  j["checkpoint_every"] = 10;
  j["eval"] = {{"episodes", 2}, {"every", 15}, {"probe_states", 8}};
  j["seed"] = seed;
  return j;
}

}  // namespace

TEST_CASE("parse_run_config: defaults, entropy target from the env") {
  const RunConfig lander = parse_run_config({{"environment", "line_lander"}});
  CHECK(lander.variant.variant == Variant::SacD);
  CHECK(lander.variant.gamma == 0.99);
  CHECK(lander.variant.entropy_target == -1.0);
  CHECK(lander.components.size() == 4);
  CHECK(lander.components[0].name == "landing");

  const RunConfig walker = parse_run_config({{"environment", "gap_walker"}});
  CHECK(walker.variant.entropy_target == -2.0);  // two-dimensional action
  CHECK(walker.components.size() == 3);
}

TEST_CASE("parse_run_config: strict key checking with the offending key named") {
  CHECK_THROWS_WITH_AS(parse_run_config({{"environment", "line_lander"}, {"learning_rate", 1e-3}}),
                       doctest::Contains("learning_rate"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(
      parse_run_config({{"environment", "line_lander"}, {"env_overrides", {{"gravty", 2.0}}}}),
      doctest::Contains("gravty"), std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config({{"environment", "moon_lander"}}), std::invalid_argument);
}

TEST_CASE("parse_run_config: component overrides validated against the env") {
  json j = {{"environment", "line_lander"}};
  j["components"] = json::array({{{"name", "crash"},
                                  {"sign", "non_positive"},
                                  {"clip_target", true},
                                  {"weight", 2.0}}});
  const RunConfig cfg = parse_run_config(j);
  const ComponentSpec& crash = cfg.components[1];
  CHECK(crash.name == "crash");
  CHECK(crash.sign == Sign::NonPositive);
  CHECK(crash.clip_target);
  CHECK(crash.weight == 2.0);
  CHECK(cfg.components[0].weight == 1.0);  // untouched

  j["components"][0]["name"] = "explosion";
  CHECK_THROWS_WITH_AS(parse_run_config(j), doctest::Contains("explosion"),
                       std::invalid_argument);
}

TEST_CASE("parse_run_config: range checks on gamma and eta") {
  CHECK_THROWS_AS(parse_run_config({{"environment", "line_lander"}, {"gamma", 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_run_config({{"environment", "line_lander"}, {"eta", 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("config JSON round-trips through the canonical snapshot") {
  json j = small_run_json(77);
  j["components"] = json::array({{{"name", "failure"},
                                  {"sign", "non_positive"},
                                  {"penalty", true},
                                  {"schedule", {{"tau_warmup", 50.0}, {"beta", 1e-3}}}}});
  const RunConfig a = parse_run_config(j);
  const RunConfig b = parse_run_config(run_config_to_json(a));
  CHECK(run_config_to_json(a).dump() == run_config_to_json(b).dump());
  CHECK(config_hash(a) == config_hash(b));

  RunConfig c = a;
  c.seed += 1;
  CHECK(config_hash(c) != config_hash(a));
}

TEST_CASE("metric doubles round-trip exactly through JSON text") {
  const double awkward = 0.1 + 0.2;
  const json rec = {{"v", awkward}, {"w", 1e-17}, {"x", -123456.789012345678}};
  const json back = json::parse(rec.dump());
  CHECK(back.at("v").get<double>() == awkward);
  CHECK(back.at("w").get<double>() == 1e-17);
  CHECK(back.at("x").get<double>() == -123456.789012345678);
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
  const fs::path dir = fresh_dir("ckpt");
  Checkpoint c;
  c.config_hash = 0xdeadbeef12345678ull;
  c.step = 42;
  c.add("weights", {1.5, -2.25, 0.1 + 0.2});
  c.add("empty", {});
  save_checkpoint(c, dir / "a.bin");
  const Checkpoint loaded = load_checkpoint(dir / "a.bin");
  CHECK(loaded.config_hash == c.config_hash);
  CHECK(loaded.step == 42);
  CHECK(loaded.get("weights") == c.get("weights"));
  CHECK(loaded.has("empty"));
  CHECK(!loaded.has("missing"));
  CHECK_THROWS_AS(loaded.get("missing"), std::exception);
  save_checkpoint(loaded, dir / "b.bin");
  CHECK(slurp(dir / "a.bin") == slurp(dir / "b.bin"));
}

TEST_CASE("write_csv: RFC-style CRLF lines, full double precision") {
  const fs::path dir = fresh_dir("csv");
  write_csv(dir / "out.csv", {"a", "b"}, {{0.1 + 0.2, -1.0}, {3.0, 1e-17}});
  const std::string text = slurp(dir / "out.csv");
  CHECK(text.find("\r\n") != std::string::npos);
  CHECK(text.substr(0, 5) == "a,b\r\n");
  // %.17g preserves the awkward sum bit-for-bit.
  CHECK(std::stod(text.substr(5, text.find(',', 5) - 5)) == 0.1 + 0.2);
}

TEST_CASE("train_run: artifact layout, metric log contents, determinism") {
  const json j = small_run_json(5);
  const RunConfig cfg = parse_run_config(j);
  const fs::path dir1 = fresh_dir("run1");
  const fs::path dir2 = fresh_dir("run2");
  train_run(cfg, dir1);
  train_run(cfg, dir2);

  for (const char* f : {"config.json", "metrics.jsonl", "timing.jsonl", "ckpt_initial.bin",
                        "ckpt_10.bin", "ckpt_20.bin", "ckpt_30.bin", "ckpt_final.bin"})
    CHECK(fs::exists(dir1 / f));

  // Bit-identical metric logs and final checkpoints across reruns.
  CHECK(slurp(dir1 / "metrics.jsonl") == slurp(dir2 / "metrics.jsonl"));
  CHECK(slurp(dir1 / "ckpt_final.bin") == slurp(dir2 / "ckpt_final.bin"));

  std::ifstream metrics(dir1 / "metrics.jsonl");
  std::vector<json> records;
  std::string line;
  while (std::getline(metrics, line)) records.push_back(json::parse(line));
  REQUIRE(records.size() == 4);  // steps 10, 15 (eval), 20, 30
  CHECK(records[0].at("step") == 10);
  CHECK(records[1].at("step") == 15);
  CHECK(records[3].at("step") == 30);
  for (const json& r : records) {
    CHECK(r.contains("component_losses"));
    CHECK(r.at("component_losses").size() == 4);  // 3 env heads + entropy
    CHECK(r.contains("alpha"));
    CHECK(!r.contains("wall_ms"));  // timing lives in timing.jsonl only
  }
  CHECK(records[1].contains("eval_returns"));
  CHECK(records[1].contains("eval_composite"));
  CHECK(records[1].contains("influence_mean"));
  CHECK(records[1].at("influence_mean").size() == 4);
  CHECK(!records[0].contains("eval_returns"));
}

TEST_CASE("load_run restores the trainer and rejects mismatched configs") {
  const RunConfig cfg = parse_run_config(small_run_json(9));
  const fs::path dir = fresh_dir("resume");
  train_run(cfg, dir);

  LoadedRun run = load_run(dir / "config.json", dir / "ckpt_final.bin");
  CHECK(run.trainer->gradient_steps() == 30);
  CHECK(run.config.seed == 9);

  // Restoring into a fresh trainer reproduces the saved parameters exactly.
  const Checkpoint ckpt = load_checkpoint(dir / "ckpt_final.bin");
  CHECK(run.trainer->policy().params == ckpt.get("policy_params"));
  CHECK(run.trainer->critic().target1 == ckpt.get("critic_target1"));

  // A config with a different seed hashes differently and is rejected.
  json other = small_run_json(10);
  const fs::path other_cfg = dir / "other_config.json";
  std::ofstream(other_cfg) << run_config_to_json(parse_run_config(other)).dump(2) << "\n";
  CHECK_THROWS_AS(load_run(other_cfg, dir / "ckpt_final.bin"), std::runtime_error);
}

TEST_CASE("evaluate_policy: composites are the weighted component sums") {
  RunConfig cfg = parse_run_config(small_run_json(3));
  cfg.components[2].weight = 0.5;
  auto env = make_env(cfg);
  Trainer trainer(env->spec(), cfg.variant, cfg.components, cfg.seed);
  const EvalResult res = evaluate_policy(*env, trainer.policy(), cfg.components, 3, 4);
  REQUIRE(res.per_episode_returns.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    const auto& row = res.per_episode_returns[e];
    const double expected = row[0] + row[1] + 0.5 * row[2];
    CHECK(res.composites[e] == doctest::Approx(expected).epsilon(1e-12));
  }
}

#ifdef SACD_CLI_PATH
TEST_CASE("command-line tool: train, evaluate and analyze end to end") {
  const fs::path dir = fresh_dir("cli");
  const fs::path cfg_path = dir / "run.json";
  std::ofstream(cfg_path) << small_run_json(21).dump(2) << "\n";
  const std::string cli = SACD_CLI_PATH;
  const fs::path run_dir = dir / "run";
  const fs::path out_dir = dir / "out";

  auto exec = [](const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); };

  REQUIRE(exec(cli + " --output-dir " + run_dir.string() + " train --config " +
               cfg_path.string()) == 0);
  CHECK(fs::exists(run_dir / "ckpt_final.bin"));

  CHECK(exec(cli + " --output-dir " + out_dir.string() + " evaluate --checkpoint " +
             (run_dir / "ckpt_final.bin").string() + " --episodes 3") == 0);
  const std::string eval_csv = slurp(out_dir / "evaluation.csv");
  CHECK(eval_csv.substr(0, eval_csv.find("\r\n")) == "forward,control,failure,composite");
  CHECK(std::count(eval_csv.begin(), eval_csv.end(), '\n') == 4);  // header + 3 episodes

  CHECK(exec(cli + " --output-dir " + out_dir.string() +
             " analyze --mode influence-trajectory --input " +
             (run_dir / "ckpt_final.bin").string()) == 0);
  CHECK(fs::exists(out_dir / "influence_trajectory.csv"));

  CHECK(exec(cli + " --output-dir " + out_dir.string() +
             " analyze --mode influence-summary --input " + run_dir.string()) == 0);
  const std::string summary = slurp(out_dir / "influence_summary.csv");
  CHECK(summary.rfind("step,", 0) == 0);

  CHECK(exec(cli + " --output-dir " + out_dir.string() +
             " analyze --mode returns-vs-predictions --input " +
             (run_dir / "ckpt_final.bin").string() + " --episodes 4 --window 5") == 0);
  const std::string acc = slurp(out_dir / "accuracy.csv");
  CHECK(acc.rfind("component,iqm_rmse,iqm_correlation,correlation_flagged", 0) == 0);

  // Unknown mode and bad config fail loudly.
  CHECK(exec(cli + " analyze --mode nonsense --input " + (run_dir / "ckpt_final.bin").string()) !=
        0);
  CHECK(exec(cli + " train --config " + (dir / "missing.json").string()) != 0);
}
#endif
