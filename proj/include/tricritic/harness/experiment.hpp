#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tricritic/harness/config.hpp"

namespace tricritic {

struct PhaseTimings {
  double train_seconds = 0.0;
  double eval_seconds = 0.0;
  double probe_seconds = 0.0;
  double total_seconds = 0.0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::filesystem::path train_csv;
  std::filesystem::path eval_csv;
  std::filesystem::path bias_csv;
  std::filesystem::path checkpoint;
  double final_mean_return = 0.0;
  PhaseTimings timings;
};

struct RunReport {
  std::string config_hash;
  std::string env_id;
  std::string strategy;
  std::filesystem::path output_dir;
  std::vector<SeedResult> seeds;  // in config order
  // Over successful seeds; std is the population standard deviation.
  double final_mean_return = 0.0;
  double final_std_return = 0.0;

  std::size_t failed_seeds() const;
};

struct RunOptions {
  std::size_t jobs = 1;  // seeds run concurrently
  bool quiet = true;
};

// Trains one seed and writes seed_<s>/{train,eval,bias}.csv and
// checkpoint.bin under dir. Outputs depend on (config, seed) only.
SeedResult run_seed(const ExperimentConfig& config, std::uint64_t seed, const std::filesystem::path& dir);

// Runs every seed, then writes config.json and report.json into the output
// directory. A failing seed is recorded in the report; the others proceed.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

void write_report(const std::filesystem::path& path, const RunReport& report);
// Throws std::runtime_error on unreadable or malformed reports. Relative
// paths inside the report resolve against the report's directory.
RunReport read_report(const std::filesystem::path& path);

}  // namespace tricritic
