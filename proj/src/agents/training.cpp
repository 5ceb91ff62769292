#include "tricritic/agents/training.hpp"

#include <algorithm>
#include <cmath>

#include "tricritic/errors.hpp"

namespace tricritic {

TrainingStreams::TrainingStreams(std::uint64_t seed)
    : run_seed(seed),
      exploration(make_rng(derive_seed(seed, "exploration"))),
      target_noise(make_rng(derive_seed(seed, "target-noise"))),
      sampling(make_rng(derive_seed(seed, "replay-sampling"))) {}

std::uint64_t TrainingStreams::episode_seed(std::uint64_t episode) const {
  return derive_seed(run_seed, "train-episode", episode);
}

namespace {
bool same_double(double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; }
}  // namespace

bool operator==(const StepMetrics& a, const StepMetrics& b) {
  if (a.critic_losses.size() != b.critic_losses.size()) return false;
  for (std::size_t i = 0; i < a.critic_losses.size(); ++i)
    if (!same_double(a.critic_losses[i], b.critic_losses[i])) return false;
  return a.step == b.step && a.episode == b.episode && same_double(a.reward, b.reward) && a.done == b.done &&
         a.truncated == b.truncated && a.critics_updated == b.critics_updated &&
         a.actor_updated == b.actor_updated && same_double(a.actor_objective, b.actor_objective) &&
         same_double(a.action_mean, b.action_mean) && same_double(a.action_abs_max, b.action_abs_max) &&
         a.episode_return == b.episode_return;
}

TrainingSession::TrainingSession(Agent agent, std::unique_ptr<Env> env, std::uint64_t seed)
    : agent_(std::move(agent)),
      env_(std::move(env)),
      buffer_(agent_.config().buffer_capacity),
      streams_(seed) {
  if (!env_) throw ConfigError("training session needs an environment");
  if (!(env_->spec() == agent_.env_spec())) throw ShapeError("agent and environment specs differ");
  state_ = env_->reset(streams_.episode_seed(episode_));
}

StepMetrics train_step(TrainingSession& s) {
  Agent& agent = s.agent_;
  const AgentConfig& cfg = agent.config();

  StepMetrics m;
  const std::vector<double> action = agent.select_action(s.state_, true, s.streams_.exploration);
  const StepResult r = s.env_->step(action);
  s.buffer_.push({s.state_, action, r.reward, r.next_state, r.done ? 0.0 : 1.0});
  agent.record_step();
  s.episode_return_ += r.reward;

  m.step = agent.steps();
  m.episode = s.episode_;
  m.reward = r.reward;
  m.done = r.done;
  m.truncated = r.truncated;
  double sum = 0.0;
  for (double a : action) {
    sum += a;
    m.action_abs_max = std::max(m.action_abs_max, std::abs(a));
  }
  m.action_mean = sum / static_cast<double>(action.size());

  if (m.step > cfg.warmup_steps && s.buffer_.size() > 0) {
    s.buffer_.sample(cfg.batch_size, s.streams_.sampling, s.batch_);
    m.critic_losses = agent.critic_update(s.batch_, s.streams_.target_noise).losses;
    m.critics_updated = true;
    if (m.step % cfg.policy_delay == 0) {
      m.actor_objective = agent.actor_update(s.batch_);
      m.actor_updated = true;
      agent.soft_update(cfg.tau);
    }
  }

  if (r.done || r.truncated) {
    m.episode_return = s.episode_return_;
    s.episode_return_ = 0.0;
    ++s.episode_;
    s.state_ = s.env_->reset(s.streams_.episode_seed(s.episode_));
  } else {
    s.state_ = r.next_state;
  }
  return m;
}

}  // namespace tricritic
