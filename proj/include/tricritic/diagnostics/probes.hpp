#pragma once

// Measurement instruments run against read-only snapshots of an agent.
// Each probe draws from its own seed, so probing never changes training.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tricritic/agents/agent.hpp"
#include "tricritic/envs/env.hpp"

namespace tricritic::diag {

struct StartRecord {
  std::vector<double> state;   // s0
  std::vector<double> action;  // a0 = pi(s0)
  double discounted_return = 0.0;
};

struct TrueQResult {
  double mean = 0.0;
  std::vector<StartRecord> starts;  // in episode order
};

// Rolls n_episodes fresh episodes (episode i reset with
// derive_seed(seed, "probe-episode", i)) with the deterministic policy until
// termination, truncation or horizon, accumulating sum_t gamma^t r_t.
// Episodes advance in lockstep through batched policy calls; each episode's
// result equals a sequential rollout.
TrueQResult true_q_monte_carlo(const BatchPolicy& policy, const EnvFactory& factory, std::size_t n_episodes,
                               double gamma, std::size_t horizon, std::uint64_t seed);

// Mean over starts of the average over critics of Q_i(s0, a0).
double estimated_q(const Agent& agent, std::span<const StartRecord> starts, bool use_target_critics = false);

struct BiasSample {
  std::uint64_t train_step = 0;
  double estimated_q_mean = 0.0;
  double true_q_mean = 0.0;
  double bias = 0.0;  // estimated - true
  std::size_t n_samples = 0;
  // gamma^horizon * r_max / (1 - gamma): how much the truncated rollouts can
  // miss relative to an infinite-horizon value.
  double truncation_bound = 0.0;

  friend bool operator==(const BiasSample&, const BiasSample&) = default;
};

struct ProbeConfig {
  std::size_t episodes = 100;
  double gamma = 0.99;
  std::size_t horizon = 0;  // 0: the environment's max_episode_steps
  std::uint64_t seed = 0;
  bool use_target_critics = false;
};

BiasSample bias_probe(const Agent& agent, const EnvFactory& factory, const ProbeConfig& config,
                      std::uint64_t train_step);

struct EvalReport {
  std::uint64_t train_step = 0;
  double mean_return = 0.0;
  std::vector<double> per_episode_returns;
  std::size_t n_episodes = 0;

  double min_return() const;
  double max_return() const;
  double std_return() const;  // population standard deviation

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Undiscounted returns of the deterministic policy on fresh episodes
// (episode i reset with derive_seed(seed, "eval-episode", i)).
EvalReport evaluate_policy(const BatchPolicy& policy, const EnvFactory& factory, std::size_t n_episodes,
                           std::uint64_t seed, std::uint64_t train_step = 0);

}  // namespace tricritic::diag
