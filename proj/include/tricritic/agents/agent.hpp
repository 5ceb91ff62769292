#pragma once

// Deterministic actor-critic agent with a pluggable critic-target rule.
// One agent type covers the single-critic, clipped double and triplet
// variants; only the number of critics and the target combination differ.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "tricritic/agents/target_rule.hpp"
#include "tricritic/diffcore/adam.hpp"
#include "tricritic/diffcore/mlp.hpp"
#include "tricritic/envs/env.hpp"
#include "tricritic/matrix.hpp"
#include "tricritic/replay/replay_buffer.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {

struct AgentConfig {
  double gamma = 0.99;
  double tau = 0.005;
  std::size_t policy_delay = 2;
  // Absolute std of exploration noise; unset means 0.1 * action_bound.
  std::optional<double> exploration_noise_std;
  double target_noise_std = 0.2;
  double target_noise_clip = 0.5;
  std::size_t batch_size = 256;
  std::size_t warmup_steps = 1000;
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  std::size_t buffer_capacity = 1'000'000;

  void validate() const;
  double exploration_std(double action_bound) const {
    return exploration_noise_std.value_or(0.1 * action_bound);
  }
  friend bool operator==(const AgentConfig&, const AgentConfig&) = default;
};

struct NetworkConfig {
  std::vector<std::size_t> hidden_widths = {256, 256};
  HiddenActivation hidden_activation = HiddenActivation::ReLU;

  void validate() const;
  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Maps a batch of states (one per row) to a batch of actions.
using BatchPolicy = std::function<void(const Matrix& states, Matrix& actions)>;

struct CriticUpdateResult {
  std::vector<double> losses;   // one per critic
  std::vector<double> targets;  // shared y, one per batch element
};

class Agent {
 public:
  Agent(const EnvSpec& env, TargetRule rule, AgentConfig config, NetworkConfig network, std::uint64_t seed);

  TargetRule rule() const { return rule_; }
  std::size_t critic_count() const { return critics_.size(); }
  const AgentConfig& config() const { return config_; }
  const NetworkConfig& network_config() const { return network_; }
  const EnvSpec& env_spec() const { return env_; }
  const MlpSpec& actor_spec() const { return actor_spec_; }
  const MlpSpec& critic_spec() const { return critic_spec_; }

  // Number of environment interactions recorded so far.
  std::uint64_t steps() const { return steps_; }
  void record_step() { ++steps_; }
  std::uint64_t critic_updates() const { return critic_updates_; }
  std::uint64_t actor_updates() const { return actor_updates_; }

  const ParamVector& actor() const { return actor_; }
  const ParamVector& target_actor() const { return target_actor_; }
  const ParamVector& critic(std::size_t i) const { return critics_.at(i); }
  const ParamVector& target_critic(std::size_t i) const { return target_critics_.at(i); }
  const OptimizerState& actor_optimizer() const { return actor_opt_; }
  const OptimizerState& critic_optimizer(std::size_t i) const { return critic_opts_.at(i); }
  ParamVector& mutable_actor() { return actor_; }
  ParamVector& mutable_target_actor() { return target_actor_; }
  ParamVector& mutable_critic(std::size_t i) { return critics_.at(i); }
  ParamVector& mutable_target_critic(std::size_t i) { return target_critics_.at(i); }
  void set_steps(std::uint64_t steps) { steps_ = steps; }

  // pi(s) with no noise.
  std::vector<double> policy_action(std::span<const double> state) const;
  void policy_actions(const Matrix& states, Matrix& actions) const;

  // Uniform over the action box while steps() < warmup_steps; otherwise
  // pi(s) plus N(0, sigma) per dimension when explore is set. Always clamped.
  std::vector<double> select_action(std::span<const double> state, bool explore, Rng& noise) const;

  // pi'(s') + clip(N(0, sigma~), -c, c) per dimension, clamped to the action box.
  void smoothed_target_actions(const Matrix& next_states, Rng& noise, Matrix& out) const;
  std::vector<double> smoothed_target_action(std::span<const double> next_state, Rng& noise) const;

  // Q_i(s, a) (or the target critic) for each row.
  std::vector<double> critic_values(std::size_t i, const Matrix& states, const Matrix& actions,
                                    bool use_target = false) const;

  // Shared TD targets for a batch given the target actions.
  std::vector<double> compute_targets(const Batch& batch, const Matrix& target_actions) const;

  // One Adam step per critic on the mean squared TD error against one shared
  // target per batch element. Throws NumericError (no parameters touched)
  // when any loss is non-finite.
  CriticUpdateResult critic_update(const Batch& batch, Rng& noise);

  // One ascent step of the actor on mean Q_1(s, pi(s)); returns the objective
  // before the step. Critics are not modified.
  double actor_update(const Batch& batch);

  // target <- tau * current + (1 - tau) * target for every critic and the actor.
  void soft_update(double tau);

  BatchPolicy policy_snapshot() const;

  void save(const std::filesystem::path& path) const;
  // Restores parameters, optimizer states and counters into an agent built
  // with the same rule and network shapes.
  void load(const std::filesystem::path& path);

 private:
  EnvSpec env_;
  TargetRule rule_;
  AgentConfig config_;
  NetworkConfig network_;
  MlpSpec actor_spec_;
  MlpSpec critic_spec_;

  ParamVector actor_;
  ParamVector target_actor_;
  OptimizerState actor_opt_;
  std::vector<ParamVector> critics_;
  std::vector<ParamVector> target_critics_;
  std::vector<OptimizerState> critic_opts_;

  std::uint64_t steps_ = 0;
  std::uint64_t critic_updates_ = 0;
  std::uint64_t actor_updates_ = 0;

  // Scratch reused across updates.
  mutable MlpWorkspace actor_ws_;
  mutable MlpWorkspace critic_ws_;
  mutable Matrix critic_input_;
  mutable Matrix target_actions_;
  mutable Matrix upstream_;
  mutable Matrix input_grads_;
  std::vector<ParamVector> grads_;
  ParamVector actor_grad_;
};

// Loss N^-1 sum (y - Q(s, a))^2 for one critic; adds dLoss/dparams into *grad when non-null.
double critic_loss_and_gradient(const MlpSpec& critic_spec, const ParamVector& critic, const Batch& batch,
                                std::span<const double> targets, ParamVector* grad);

// Objective N^-1 sum Q(s, pi(s)); adds dJ/dactor_params into *grad when non-null.
double actor_objective_and_gradient(const MlpSpec& actor_spec, const ParamVector& actor,
                                    const MlpSpec& critic_spec, const ParamVector& critic,
                                    const Matrix& states, ParamVector* grad);

// Single-sample target from explicit target-critic parameters. Throws
// UsageError when the parameter count does not match the rule.
double compute_target(TargetRule rule, const MlpSpec& critic_spec, std::span<const ParamVector> target_critics,
                      std::span<const double> next_state, std::span<const double> action, double reward,
                      double done_mask, double gamma);

// [states | actions] row-wise.
void concat_columns(const Matrix& left, const Matrix& right, Matrix& out);

}  // namespace tricritic
