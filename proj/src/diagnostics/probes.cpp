#include "tricritic/diagnostics/probes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"

namespace tricritic::diag {
namespace {

struct Rollout {
  std::vector<double> returns;
  std::vector<StartRecord> starts;
};

// Lockstep rollouts. discount = 1 gives undiscounted returns.
Rollout run_episodes(const BatchPolicy& policy, const EnvFactory& factory, std::size_t n_episodes,
                     double discount, std::size_t horizon, std::uint64_t seed, std::string_view label,
                     bool record_starts) {
  if (n_episodes < 1) throw UsageError("at least one episode is required");
  std::vector<std::unique_ptr<Env>> envs;
  std::vector<std::vector<double>> states;
  for (std::size_t i = 0; i < n_episodes; ++i) {
    envs.push_back(factory());
    states.push_back(envs.back()->reset(derive_seed(seed, label, i)));
  }
  const EnvSpec spec = envs.front()->spec();
  if (horizon == 0) horizon = spec.max_episode_steps;

  Rollout out;
  out.returns.assign(n_episodes, 0.0);
  if (record_starts) out.starts.resize(n_episodes);
  std::vector<double> weight(n_episodes, 1.0);
  std::vector<std::size_t> active(n_episodes);
  std::iota(active.begin(), active.end(), 0);

  Matrix batch_states;
  Matrix batch_actions;
  for (std::size_t t = 0; t < horizon && !active.empty(); ++t) {
    batch_states.resize(active.size(), spec.state_dim);
    for (std::size_t r = 0; r < active.size(); ++r)
      std::copy(states[active[r]].begin(), states[active[r]].end(), batch_states.row(r).begin());
    policy(batch_states, batch_actions);

    std::vector<std::size_t> still;
    for (std::size_t r = 0; r < active.size(); ++r) {
      const std::size_t e = active[r];
      const auto action = batch_actions.row(r);
      if (t == 0 && record_starts) out.starts[e] = {states[e], {action.begin(), action.end()}, 0.0};
      const StepResult res = envs[e]->step(action);
      out.returns[e] += weight[e] * res.reward;
      weight[e] *= discount;
      if (res.done || res.truncated) continue;
      states[e] = res.next_state;
      still.push_back(e);
    }
    active.swap(still);
  }
  if (record_starts)
    for (std::size_t e = 0; e < n_episodes; ++e) out.starts[e].discounted_return = out.returns[e];
  return out;
}

}  // namespace

TrueQResult true_q_monte_carlo(const BatchPolicy& policy, const EnvFactory& factory, std::size_t n_episodes,
                               double gamma, std::size_t horizon, std::uint64_t seed) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  Rollout r = run_episodes(policy, factory, n_episodes, gamma, horizon, seed, "probe-episode", true);
  TrueQResult result;
  double sum = 0.0;
  for (double v : r.returns) sum += v;
  result.mean = sum / static_cast<double>(n_episodes);
  result.starts = std::move(r.starts);
  return result;
}

double estimated_q(const Agent& agent, std::span<const StartRecord> starts, bool use_target_critics) {
  if (starts.empty()) throw UsageError("estimated_q needs at least one start");
  const EnvSpec& spec = agent.env_spec();
  Matrix s(starts.size(), spec.state_dim);
  Matrix a(starts.size(), spec.action_dim);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i].state.size() != spec.state_dim || starts[i].action.size() != spec.action_dim)
      throw UsageError("start record dimensions do not match the agent");
    std::copy(starts[i].state.begin(), starts[i].state.end(), s.row(i).begin());
    std::copy(starts[i].action.begin(), starts[i].action.end(), a.row(i).begin());
  }
  std::vector<double> avg(starts.size(), 0.0);
  for (std::size_t c = 0; c < agent.critic_count(); ++c) {
    const std::vector<double> q = agent.critic_values(c, s, a, use_target_critics);
    for (std::size_t i = 0; i < q.size(); ++i) avg[i] += q[i];
  }
  double sum = 0.0;
  for (double v : avg) sum += v / static_cast<double>(agent.critic_count());
  return sum / static_cast<double>(starts.size());
}

BiasSample bias_probe(const Agent& agent, const EnvFactory& factory, const ProbeConfig& config,
                      std::uint64_t train_step) {
  const std::size_t horizon = config.horizon == 0 ? agent.env_spec().max_episode_steps : config.horizon;
  const TrueQResult truth =
      true_q_monte_carlo(agent.policy_snapshot(), factory, config.episodes, config.gamma, horizon, config.seed);
  BiasSample sample;
  sample.train_step = train_step;
  sample.true_q_mean = truth.mean;
  sample.estimated_q_mean = estimated_q(agent, truth.starts, config.use_target_critics);
  sample.bias = sample.estimated_q_mean - sample.true_q_mean;
  sample.n_samples = truth.starts.size();
  const double r_max = factory()->reward_bound();
  sample.truncation_bound =
      config.gamma < 1.0 ? std::pow(config.gamma, static_cast<double>(horizon)) * r_max / (1.0 - config.gamma) : 0.0;
  return sample;
}

double EvalReport::min_return() const {
  return *std::min_element(per_episode_returns.begin(), per_episode_returns.end());
}

double EvalReport::max_return() const {
  return *std::max_element(per_episode_returns.begin(), per_episode_returns.end());
}

double EvalReport::std_return() const {
  double ss = 0.0;
  for (double v : per_episode_returns) ss += (v - mean_return) * (v - mean_return);
  return std::sqrt(ss / static_cast<double>(per_episode_returns.size()));
}

EvalReport evaluate_policy(const BatchPolicy& policy, const EnvFactory& factory, std::size_t n_episodes,
                           std::uint64_t seed, std::uint64_t train_step) {
  Rollout r = run_episodes(policy, factory, n_episodes, 1.0, 0, seed, "eval-episode", false);
  EvalReport report;
  report.train_step = train_step;
  report.n_episodes = n_episodes;
  report.per_episode_returns = std::move(r.returns);
  double sum = 0.0;
  for (double v : report.per_episode_returns) sum += v;
  report.mean_return = sum / static_cast<double>(n_episodes);
  return report;
}

}  // namespace tricritic::diag
