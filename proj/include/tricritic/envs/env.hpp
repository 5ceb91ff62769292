#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tricritic {

struct EnvSpec {
  std::size_t state_dim = 1;
  std::size_t action_dim = 1;
  double action_bound = 1.0;  // actions live in [-bound, bound]^action_dim
  std::size_t max_episode_steps = 1;

  void validate() const;
  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;
};

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  bool done = false;       // terminal state reached; do not bootstrap
  bool truncated = false;  // time limit hit; the state is not terminal
};

// A single-owner episodic environment. step() after done or truncated
// without an intervening reset() throws UsageError.
class Env {
 public:
  virtual ~Env() = default;

  virtual const EnvSpec& spec() const = 0;
  virtual std::string id() const = 0;
  // Initial state drawn from the documented distribution; a pure function of seed.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  // Actions outside the box are clamped.
  virtual StepResult step(std::span<const double> action) = 0;
  // Upper bound on |reward| of a single step (before any additive noise).
  virtual double reward_bound() const = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>()>;

// Step counting and done/truncated bookkeeping shared by the built-in tasks.
class EpisodeClock {
 public:
  void start() {
    steps_ = 0;
    active_ = true;
  }
  // Throws UsageError when the episode is over or was never started.
  void require_active(const std::string& env_id) const;
  // Advances the counter; returns true when the time limit is reached.
  bool tick(std::size_t max_steps);
  void finish() { active_ = false; }
  std::size_t steps() const { return steps_; }
  bool active() const { return active_; }

 private:
  std::size_t steps_ = 0;
  bool active_ = false;
};

// Copies the action and clamps each component to [-bound, bound].
std::vector<double> clamp_action(std::span<const double> action, const EnvSpec& spec);

}  // namespace tricritic
