#include "rael/harness/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace rael::harness {

namespace fs = std::filesystem;

namespace {

void check_keys(const YAML::Node& node, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(where + " must be a mapping");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node || !node[key] || node[key].IsNull()) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for " + where + "." + key);
  }
}

void read_rewards(const YAML::Node& node, env::Rewards& r, const std::string& where) {
  check_keys(node, where, {"goal", "step", "failure"});
  read(node, "goal", r.goal, where);
  read(node, "step", r.step, where);
  read(node, "failure", r.failure, where);
}

void read_decay(const YAML::Node& node, engine::DecaySchedule& d, const std::string& where) {
  check_keys(node, where, {"start", "decay", "floor"});
  read(node, "start", d.start, where);
  read(node, "decay", d.decay, where);
  read(node, "floor", d.floor, where);
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

ExpertMode parse_mode(const std::string& s) {
  if (s == "none") return ExpertMode::None;
  if (s == "oracle-action") return ExpertMode::OracleActionOnly;
  if (s == "oracle-abstraction") return ExpertMode::OracleWithAbstraction;
  if (s == "interactive") return ExpertMode::Interactive;
  throw ConfigError("advice.expert must be none, oracle-action, oracle-abstraction or interactive, not '" + s + "'");
}

}  // namespace

const char* to_string(ExpertMode mode) {
  switch (mode) {
    case ExpertMode::None: return "none";
    case ExpertMode::OracleActionOnly: return "oracle-action";
    case ExpertMode::OracleWithAbstraction: return "oracle-abstraction";
    case ExpertMode::Interactive: return "interactive";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping");
  check_keys(root, "config",
             {"name", "environment", "schedules", "learner", "loop", "advice", "fidelity", "seeds", "output"});

  ExperimentConfig c;
  c.source = text;
  read(root, "name", c.name, "config");

  const auto env = root["environment"];
  check_keys(env, "environment",
             {"type", "blocks", "levels", "columns", "max_ladders_per_level", "threat", "monkey_period", "step_cap",
              "rewards"});
  read(env, "type", c.environment.type, "environment");
  if (c.environment.type == "blocksworld") {
    auto& p = c.environment.blocks;
    read(env, "blocks", p.blocks, "environment");
    read(env, "step_cap", p.step_cap, "environment");
    if (env) read_rewards(env["rewards"], p.rewards, "environment.rewards");
    if (p.blocks < 2) throw ConfigError("environment.blocks must be >= 2");
    if (p.step_cap < 1) throw ConfigError("environment.step_cap must be >= 1");
  } else if (c.environment.type == "ladderworld") {
    auto& p = c.environment.ladder;
    read(env, "levels", p.levels, "environment");
    read(env, "columns", p.columns, "environment");
    read(env, "max_ladders_per_level", p.max_ladders_per_level, "environment");
    read(env, "threat", p.threat, "environment");
    read(env, "monkey_period", p.monkey_period, "environment");
    read(env, "step_cap", p.step_cap, "environment");
    if (env) read_rewards(env["rewards"], p.rewards, "environment.rewards");
    if (p.levels < 2 || (p.threat && p.levels < 3)) throw ConfigError("environment.levels too small");
    if (p.columns < 3) throw ConfigError("environment.columns must be >= 3");
    if (p.max_ladders_per_level < 1) throw ConfigError("environment.max_ladders_per_level must be >= 1");
    if (p.monkey_period < 2) throw ConfigError("environment.monkey_period must be >= 2");
    if (p.step_cap < 1) throw ConfigError("environment.step_cap must be >= 1");
  } else {
    throw ConfigError("environment.type must be blocksworld or ladderworld, not '" + c.environment.type + "'");
  }
  if (env && env["blocks"] && c.environment.type != "blocksworld")
    throw ConfigError("environment.blocks only applies to blocksworld");

  auto& t = c.train;
  const auto sched = root["schedules"];
  check_keys(sched, "schedules", {"gamma", "tau", "alpha_blend", "delta", "psi", "explore", "advice"});
  read(sched, "gamma", t.schedules.gamma, "schedules");
  read(sched, "tau", t.schedules.tau, "schedules");
  read(sched, "alpha_blend", t.schedules.alpha_blend, "schedules");
  read(sched, "delta", t.schedules.delta, "schedules");
  read(sched, "psi", t.schedules.psi, "schedules");
  if (sched) {
    read_decay(sched["explore"], t.schedules.explore, "schedules.explore");
    read_decay(sched["advice"], t.schedules.advice, "schedules.advice");
  }

  const auto lrn = root["learner"];
  check_keys(lrn, "learner",
             {"max_depth", "min_leaf", "min_gain", "stages", "learning_rate", "initial", "bias", "max_new_vars",
              "max_literals"});
  read(lrn, "max_depth", t.learner.tree.max_depth, "learner");
  read(lrn, "min_leaf", t.learner.tree.min_leaf, "learner");
  read(lrn, "min_gain", t.learner.tree.min_gain, "learner");
  read(lrn, "stages", t.learner.stages, "learner");
  read(lrn, "learning_rate", t.learner.learning_rate, "learner");
  if (lrn && lrn["initial"] && !lrn["initial"].IsNull()) {
    double v = 0.0;
    read(lrn, "initial", v, "learner");
    t.learner.initial = v;
  }
  read(lrn, "bias", c.bias, "learner");
  read(lrn, "max_new_vars", t.bias.max_new_vars, "learner");
  read(lrn, "max_literals", t.bias.max_literals, "learner");
  if (t.bias.max_literals < 1 || t.bias.max_literals > 2) throw ConfigError("learner.max_literals must be 1 or 2");
  if (t.bias.max_new_vars < 0) throw ConfigError("learner.max_new_vars must be >= 0");

  const auto loop = root["loop"];
  check_keys(loop, "loop", {"iterations", "n_train", "n_eval", "buffer_cap", "refresh_targets", "initial_q"});
  read(loop, "iterations", t.iterations, "loop");
  read(loop, "n_train", t.n_train, "loop");
  read(loop, "n_eval", t.n_eval, "loop");
  read(loop, "buffer_cap", t.buffer_cap, "loop");
  read(loop, "refresh_targets", t.refresh_targets, "loop");
  read(loop, "initial_q", t.initial_q, "loop");

  const auto adv = root["advice"];
  check_keys(adv, "advice", {"budget", "expert", "rules", "timeout_ms"});
  read(adv, "budget", t.budget, "advice");
  std::string mode = "none";
  read(adv, "expert", mode, "advice");
  c.expert = parse_mode(mode);
  read(adv, "rules", c.rules_path, "advice");
  c.rules_path = resolve(c.rules_path, base_dir);
  read(adv, "timeout_ms", c.advice_timeout_ms, "advice");
  if (c.advice_timeout_ms < 1) throw ConfigError("advice.timeout_ms must be positive");
  if ((c.expert == ExpertMode::OracleActionOnly || c.expert == ExpertMode::OracleWithAbstraction) &&
      c.rules_path.empty())
    throw ConfigError("oracle experts need advice.rules");

  const auto fid = root["fidelity"];
  check_keys(fid, "fidelity", {"rules", "threshold", "states_per_rule", "max_episodes"});
  read(fid, "rules", c.fidelity_rules_path, "fidelity");
  c.fidelity_rules_path = c.fidelity_rules_path.empty() ? c.rules_path : resolve(c.fidelity_rules_path, base_dir);
  read(fid, "threshold", c.fidelity.threshold, "fidelity");
  read(fid, "states_per_rule", c.fidelity.states_per_rule, "fidelity");
  read(fid, "max_episodes", c.fidelity.max_episodes, "fidelity");
  if (!(c.fidelity.threshold > 0.0 && c.fidelity.threshold <= 1.0))
    throw ConfigError("fidelity.threshold must lie in (0,1]");
  if (c.fidelity.states_per_rule < 1 || c.fidelity.max_episodes < 1)
    throw ConfigError("fidelity sampling sizes must be positive");

  if (root["seeds"]) {
    try {
      c.seeds = root["seeds"].as<std::vector<std::uint64_t>>();
    } catch (const YAML::Exception&) {
      throw ConfigError("seeds must be a list of non-negative integers");
    }
    if (c.seeds.empty()) throw ConfigError("seeds must not be empty");
  }
  read(root, "output", c.output_dir, "config");

  for (const auto* path : {&c.rules_path, &c.fidelity_rules_path})
    if (!path->empty() && !fs::exists(*path)) throw ConfigError("rules file not found: " + *path);

  try {
    t.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

std::unique_ptr<env::Environment> make_environment(const EnvironmentConfig& config) {
  if (config.type == "blocksworld") return std::make_unique<env::BlocksWorld>(config.blocks);
  if (config.type == "ladderworld") return std::make_unique<env::LadderWorld>(config.ladder);
  throw ConfigError("unknown environment type '" + config.type + "'");
}

learner::LanguageBias make_bias(const ExperimentConfig& config, const env::Environment& env) {
  try {
    auto bias = learner::LanguageBias::parse(config.bias.empty() ? env.spec().default_bias : config.bias,
                                             env.spec().predicates);
    bias.max_new_vars = config.train.bias.max_new_vars;
    bias.max_literals = config.train.bias.max_literals;
    return bias;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("learner.bias: ") + e.what());
  }
}

}  // namespace rael::harness
