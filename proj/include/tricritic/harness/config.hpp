#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tricritic/agents/agent.hpp"
#include "tricritic/agents/target_rule.hpp"
#include "tricritic/envs/reward_wrapper.hpp"
#include "tricritic/errors.hpp"

namespace tricritic {

struct ExperimentConfig {
  std::string env_id = "pendulum";
  RewardTransform reward;
  TargetRule strategy = TargetRule::Triplet;
  AgentConfig agent;
  NetworkConfig network;
  std::size_t total_steps = 1'000'000;
  std::size_t eval_every = 5000;
  std::size_t eval_episodes = 10;
  std::size_t bias_probe_every = 5000;
  std::size_t bias_episodes = 100;
  bool probe_target_critics = false;
  std::size_t train_log_every = 100;
  std::vector<std::uint64_t> seeds;
  // Relative paths are resolved against TRICRITIC_OUTPUT_ROOT (or the working
  // directory). Empty means "runs/<env>_<strategy>".
  std::string output_dir;

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// A ConfigError that knows where in the source it happened.
class ConfigLoadError : public ConfigError {
 public:
  ConfigLoadError(const std::string& source, int line, const std::string& field, const std::string& message);
  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

// YAML (JSON is valid YAML too). Missing keys take defaults, unknown keys
// are rejected with a nearest-key suggestion, values are range-checked.
ExperimentConfig parse_config(const std::string& text, const std::string& source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON of the fully defaulted config (sorted keys, compact), with
// output_dir excluded; its FNV-1a 64 digest in hex is the config hash.
std::string canonical_config_text(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

// Resolved output directory for the config.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config);

// Edit distance used for key suggestions.
std::size_t edit_distance(const std::string& a, const std::string& b);

}  // namespace tricritic
