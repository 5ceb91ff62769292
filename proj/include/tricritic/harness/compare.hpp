#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricritic/harness/experiment.hpp"

namespace tricritic {

class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-seed numbers read back from a run's CSVs.
struct SeedSummary {
  std::uint64_t seed = 0;
  double final_return = 0.0;
  double auc = 0.0;            // mean of the raw eval curve
  double mean_bias = 0.0;      // over the last 25% of probes
  double mean_abs_bias = 0.0;  // mean of |bias| over the same probes
  std::vector<double> eval_steps;
  std::vector<double> eval_returns;
};

struct StrategySummary {
  std::string label;  // strategy name, suffixed when two reports share it
  std::string strategy;
  std::filesystem::path report;
  std::vector<SeedSummary> seeds;
  double final_mean = 0.0;
  double final_std = 0.0;  // population std over seeds (plots shade half of it)
  double auc_mean = 0.0;
  double mean_bias = 0.0;
  double mean_abs_bias = 0.0;
};

struct Comparison {
  std::string env_id;
  std::vector<StrategySummary> rows;  // in report order
};

// Last ceil(n/4) entries (at least one when n > 0).
std::span<const double> final_quarter(std::span<const double> values);

// Trailing moving average over up to `window` points; window 1 is the identity.
std::vector<double> smooth(std::span<const double> values, std::size_t window);

// Loads reports and their CSVs. Throws CompareError when reports disagree on
// anything except the strategy, or when a report lists failed seeds.
Comparison compare_runs(std::span<const std::filesystem::path> report_paths);

std::string render_table(const Comparison& comparison);

// Per label and eval step: across-seed mean and std of raw returns plus the
// smoothed mean. Never touches the run directories.
void write_curves(const std::filesystem::path& path, const Comparison& comparison, std::size_t window = 20);

// One row per (label, seed) with the final eval return.
void write_final_returns(const std::filesystem::path& path, const Comparison& comparison);

}  // namespace tricritic
