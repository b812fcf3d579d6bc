#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rael/engine/trainer.hpp"
#include "rael/env/blocks_world.hpp"
#include "rael/env/ladder_world.hpp"
#include "rael/expert/fidelity.hpp"

namespace rael::harness {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExpertMode { None, OracleActionOnly, OracleWithAbstraction, Interactive };
const char* to_string(ExpertMode mode);

struct EnvironmentConfig {
  std::string type = "blocksworld";
  env::BlocksWorldParams blocks;
  env::LadderWorldParams ladder;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvironmentConfig environment;
  /// Loop, schedule and learner settings; the seed is filled in per run.
  engine::TrainConfig train;
  /// Mode declarations for the learner; the environment default when empty.
  std::vector<std::string> bias;
  ExpertMode expert = ExpertMode::None;
  std::string rules_path;
  int advice_timeout_ms = 60000;
  /// Rules for the fidelity report; defaults to rules_path.
  std::string fidelity_rules_path;
  expert::FidelityParams fidelity;
  std::vector<std::uint64_t> seeds{1};
  std::string output_dir = "runs/experiment";
  /// The exact text the config was read from, written into every run directory.
  std::string source;
};

/// Parses YAML. Relative paths are resolved against base_dir. Unknown keys,
/// out-of-range values and missing rule files raise ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

std::unique_ptr<env::Environment> make_environment(const EnvironmentConfig& config);

/// Parses the bias (or the environment default) against env's signatures.
learner::LanguageBias make_bias(const ExperimentConfig& config, const env::Environment& env);

}  // namespace rael::harness
