#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "tricritic/agents/agent.hpp"
#include "tricritic/envs/env.hpp"
#include "tricritic/replay/replay_buffer.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {

// Independent random streams of one training run. Each is derived from the
// run seed and a label, so evaluation and probing never perturb training.
struct TrainingStreams {
  std::uint64_t run_seed = 0;
  Rng exploration;
  Rng target_noise;
  Rng sampling;

  explicit TrainingStreams(std::uint64_t seed);
  // Seed of the i-th training episode's environment reset.
  std::uint64_t episode_seed(std::uint64_t episode) const;
};

struct StepMetrics {
  static constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

  std::uint64_t step = 0;  // 1-based index t of this interaction
  std::uint64_t episode = 0;
  double reward = 0.0;
  bool done = false;
  bool truncated = false;
  bool critics_updated = false;
  bool actor_updated = false;
  std::vector<double> critic_losses;  // empty when no critic update happened
  double actor_objective = kNone;
  double action_mean = 0.0;
  double action_abs_max = 0.0;
  // Undiscounted return of the episode that ended on this step, if any.
  std::optional<double> episode_return;

  friend bool operator==(const StepMetrics& a, const StepMetrics& b);
};

// Owns everything one training run mutates: agent, environment, replay
// buffer, streams and the current observation.
class TrainingSession {
 public:
  TrainingSession(Agent agent, std::unique_ptr<Env> env, std::uint64_t seed);

  Agent& agent() { return agent_; }
  const Agent& agent() const { return agent_; }
  Env& env() { return *env_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  ReplayBuffer& buffer() { return buffer_; }
  TrainingStreams& streams() { return streams_; }
  std::uint64_t episodes() const { return episode_; }
  const std::vector<double>& state() const { return state_; }

 private:
  friend StepMetrics train_step(TrainingSession& session);

  Agent agent_;
  std::unique_ptr<Env> env_;
  ReplayBuffer buffer_;
  TrainingStreams streams_;
  std::vector<double> state_;
  std::uint64_t episode_ = 0;
  double episode_return_ = 0.0;
  Batch batch_;
};

// One interaction, then (past warmup) one critic update and, every
// policy_delay steps, one actor update followed by a soft target update.
StepMetrics train_step(TrainingSession& session);

}  // namespace tricritic
