#include "tricritic/agents/agent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <string>

#include "tricritic/diffcore/checkpoint.hpp"
#include "tricritic/errors.hpp"
#include "tricritic/simd/kernels.hpp"

namespace tricritic {
namespace {

constexpr std::array<char, 8> kAgentMagic = {'T', 'R', 'C', 'A', 'G', 'T', '0', '1'};

MlpSpec make_spec(std::size_t in, const NetworkConfig& net, std::size_t out, OutputActivation act) {
  MlpSpec spec;
  spec.widths.push_back(in);
  spec.widths.insert(spec.widths.end(), net.hidden_widths.begin(), net.hidden_widths.end());
  spec.widths.push_back(out);
  spec.hidden = net.hidden_activation;
  spec.output = act;
  spec.validate();
  return spec;
}

}  // namespace

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (policy_delay < 1) throw ConfigError("policy_delay must be >= 1");
  if (exploration_noise_std && !(*exploration_noise_std >= 0.0)) throw ConfigError("exploration_noise_std must be >= 0");
  if (!(target_noise_std >= 0.0)) throw ConfigError("target_noise_std must be >= 0");
  if (!(target_noise_clip >= 0.0)) throw ConfigError("target_noise_clip must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(actor_lr > 0.0)) throw ConfigError("actor_lr must be positive");
  if (!(critic_lr > 0.0)) throw ConfigError("critic_lr must be positive");
  if (buffer_capacity < 1) throw ConfigError("buffer_capacity must be >= 1");
}

void NetworkConfig::validate() const {
  for (std::size_t w : hidden_widths)
    if (w < 1) throw ConfigError("hidden widths must be >= 1");
}

void concat_columns(const Matrix& left, const Matrix& right, Matrix& out) {
  if (left.rows() != right.rows()) throw ShapeError("row counts differ in column concatenation");
  const std::size_t lc = left.cols();
  const std::size_t rc = right.cols();
  out.resize(left.rows(), lc + rc);
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(left.row(r).begin(), left.row(r).end(), dst.begin());
    std::copy(right.row(r).begin(), right.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(lc));
  }
}

Agent::Agent(const EnvSpec& env, TargetRule rule, AgentConfig config, NetworkConfig network, std::uint64_t seed)
    : env_(env), rule_(rule), config_(std::move(config)), network_(std::move(network)) {
  env_.validate();
  config_.validate();
  network_.validate();
  actor_spec_ = make_spec(env_.state_dim, network_, env_.action_dim, OutputActivation::tanh_scaled(env_.action_bound));
  critic_spec_ = make_spec(env_.state_dim + env_.action_dim, network_, 1, OutputActivation::identity());

  actor_ = mlp_init(actor_spec_, derive_seed(seed, "actor-init"));
  target_actor_ = actor_;
  actor_opt_ = make_optimizer(actor_.size(), AdamConfig{config_.actor_lr});
  actor_grad_ = ParamVector(actor_.size());
  const std::size_t k = tricritic::critic_count(rule_);
  for (std::size_t i = 0; i < k; ++i) {
    // Each critic has its own init stream so no two start identical.
    critics_.push_back(mlp_init(critic_spec_, derive_seed(seed, "critic-init", i)));
    target_critics_.push_back(critics_.back());
    critic_opts_.push_back(make_optimizer(critics_.back().size(), AdamConfig{config_.critic_lr}));
    grads_.emplace_back(critics_.back().size());
  }
}

std::vector<double> Agent::policy_action(std::span<const double> state) const {
  return mlp_forward(actor_spec_, actor_, state);
}

void Agent::policy_actions(const Matrix& states, Matrix& actions) const {
  mlp_forward_batch(actor_spec_, actor_, states, actor_ws_);
  actions = actor_ws_.output();
}

std::vector<double> Agent::select_action(std::span<const double> state, bool explore, Rng& noise) const {
  const double bound = env_.action_bound;
  if (steps_ < config_.warmup_steps) {
    if (state.size() != env_.state_dim) throw ShapeError("state length mismatch");
    std::uniform_real_distribution<double> uniform(-bound, bound);
    std::vector<double> a(env_.action_dim);
    for (double& v : a) v = uniform(noise);
    return a;
  }
  std::vector<double> a = policy_action(state);
  const double sigma = config_.exploration_std(bound);
  if (explore && sigma > 0.0) {
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& v : a) v += gauss(noise);
  }
  for (double& v : a) v = std::clamp(v, -bound, bound);
  return a;
}

void Agent::smoothed_target_actions(const Matrix& next_states, Rng& noise, Matrix& out) const {
  mlp_forward_batch(actor_spec_, target_actor_, next_states, actor_ws_);
  out = actor_ws_.output();
  const double bound = env_.action_bound;
  const double clip = config_.target_noise_clip;
  auto& vals = out.storage();
  if (config_.target_noise_std > 0.0) {
    std::normal_distribution<double> gauss(0.0, config_.target_noise_std);
    for (double& v : vals) v += std::clamp(gauss(noise), -clip, clip);
  }
  for (double& v : vals) v = std::clamp(v, -bound, bound);
}

std::vector<double> Agent::smoothed_target_action(std::span<const double> next_state, Rng& noise) const {
  Matrix s(1, next_state.size());
  std::copy(next_state.begin(), next_state.end(), s.row(0).begin());
  Matrix out;
  smoothed_target_actions(s, noise, out);
  return out.storage();
}

std::vector<double> Agent::critic_values(std::size_t i, const Matrix& states, const Matrix& actions,
                                         bool use_target) const {
  concat_columns(states, actions, critic_input_);
  const ParamVector& params = use_target ? target_critics_.at(i) : critics_.at(i);
  mlp_forward_batch(critic_spec_, params, critic_input_, critic_ws_);
  return critic_ws_.output().storage();
}

std::vector<double> Agent::compute_targets(const Batch& batch, const Matrix& target_actions) const {
  const std::size_t n = batch.size();
  const std::size_t k = critic_count();
  std::vector<std::vector<double>> q(k);
  for (std::size_t i = 0; i < k; ++i) q[i] = critic_values(i, batch.next_states, target_actions, true);
  std::vector<double> y(n);
  std::array<double, 3> row{};
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t i = 0; i < k; ++i) row[i] = q[i][b];
    y[b] = td_target(rule_, std::span<const double>(row.data(), k), batch.rewards[b], batch.done_masks[b],
                     config_.gamma);
  }
  return y;
}

double critic_loss_and_gradient(const MlpSpec& critic_spec, const ParamVector& critic, const Batch& batch,
                                std::span<const double> targets, ParamVector* grad) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("critic loss on an empty batch");
  if (targets.size() != n) throw ShapeError("one target per batch element required");
  Matrix input;
  concat_columns(batch.states, batch.actions, input);
  MlpWorkspace ws;
  mlp_forward_batch(critic_spec, critic, input, ws);
  const auto& q = ws.output().storage();
  Matrix upstream(n, 1);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t b = 0; b < n; ++b) {
    const double residual = targets[b] - q[b];
    loss += residual * residual;
    upstream(b, 0) = -2.0 * residual * inv_n;
  }
  loss *= inv_n;
  if (grad) mlp_backward_batch(critic_spec, critic, ws, upstream, grad, nullptr);
  return loss;
}

double actor_objective_and_gradient(const MlpSpec& actor_spec, const ParamVector& actor,
                                    const MlpSpec& critic_spec, const ParamVector& critic,
                                    const Matrix& states, ParamVector* grad) {
  const std::size_t n = states.rows();
  if (n == 0) throw UsageError("actor objective on an empty batch");
  MlpWorkspace actor_ws;
  mlp_forward_batch(actor_spec, actor, states, actor_ws);
  Matrix input;
  concat_columns(states, actor_ws.output(), input);
  MlpWorkspace critic_ws;
  mlp_forward_batch(critic_spec, critic, input, critic_ws);
  double objective = 0.0;
  for (double q : critic_ws.output().storage()) objective += q;
  objective /= static_cast<double>(n);
  if (grad) {
    Matrix upstream(n, 1, 1.0 / static_cast<double>(n));
    Matrix input_grads;
    mlp_backward_batch(critic_spec, critic, critic_ws, upstream, nullptr, &input_grads);
    const std::size_t sd = states.cols();
    const std::size_t ad = actor_spec.output_width();
    Matrix action_grads(n, ad);
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t j = 0; j < ad; ++j) action_grads(b, j) = input_grads(b, sd + j);
    mlp_backward_batch(actor_spec, actor, actor_ws, action_grads, grad, nullptr);
  }
  return objective;
}

CriticUpdateResult Agent::critic_update(const Batch& batch, Rng& noise) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("critic update on an empty batch");
  smoothed_target_actions(batch.next_states, noise, target_actions_);
  CriticUpdateResult result;
  result.targets = compute_targets(batch, target_actions_);

  concat_columns(batch.states, batch.actions, critic_input_);
  upstream_.resize(n, 1);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < critic_count(); ++i) {
    mlp_forward_batch(critic_spec_, critics_[i], critic_input_, critic_ws_);
    const auto& q = critic_ws_.output().storage();
    double loss = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const double residual = result.targets[b] - q[b];
      loss += residual * residual;
      upstream_(b, 0) = -2.0 * residual * inv_n;
    }
    loss *= inv_n;
    result.losses.push_back(loss);
    if (!std::isfinite(loss))
      throw NumericError("non-finite loss for critic " + std::to_string(i + 1) + " at step " + std::to_string(steps_));
    std::fill(grads_[i].values.begin(), grads_[i].values.end(), 0.0);
    mlp_backward_batch(critic_spec_, critics_[i], critic_ws_, upstream_, &grads_[i], nullptr);
  }
  for (std::size_t i = 0; i < critic_count(); ++i) {
    if (!grads_[i].all_finite())
      throw NumericError("non-finite gradient for critic " + std::to_string(i + 1) + " at step " +
                         std::to_string(steps_));
  }
  for (std::size_t i = 0; i < critic_count(); ++i) adam_step(critic_opts_[i], critics_[i], grads_[i]);
  ++critic_updates_;
  return result;
}

double Agent::actor_update(const Batch& batch) {
  const std::size_t n = batch.size();
  if (n == 0) throw UsageError("actor update on an empty batch");
  mlp_forward_batch(actor_spec_, actor_, batch.states, actor_ws_);
  concat_columns(batch.states, actor_ws_.output(), critic_input_);
  mlp_forward_batch(critic_spec_, critics_[0], critic_input_, critic_ws_);
  double objective = 0.0;
  for (double q : critic_ws_.output().storage()) objective += q;
  objective /= static_cast<double>(n);
  if (!std::isfinite(objective)) throw NumericError("non-finite actor objective at step " + std::to_string(steps_));

  // Descend on -J: upstream of the critic output is -1/N.
  upstream_.resize(n, 1);
  upstream_.fill(-1.0 / static_cast<double>(n));
  mlp_backward_batch(critic_spec_, critics_[0], critic_ws_, upstream_, nullptr, &input_grads_);
  const std::size_t sd = env_.state_dim;
  const std::size_t ad = env_.action_dim;
  Matrix& action_grads = target_actions_;
  action_grads.resize(n, ad);
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t j = 0; j < ad; ++j) action_grads(b, j) = input_grads_(b, sd + j);
  std::fill(actor_grad_.values.begin(), actor_grad_.values.end(), 0.0);
  mlp_backward_batch(actor_spec_, actor_, actor_ws_, action_grads, &actor_grad_, nullptr);
  adam_step(actor_opt_, actor_, actor_grad_);
  ++actor_updates_;
  return objective;
}

void Agent::soft_update(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("soft update tau must lie in [0, 1]");
  const auto& k = simd::kernels();
  for (std::size_t i = 0; i < critic_count(); ++i)
    k.polyak(critics_[i].size(), target_critics_[i].data(), critics_[i].data(), tau);
  k.polyak(actor_.size(), target_actor_.data(), actor_.data(), tau);
}

BatchPolicy Agent::policy_snapshot() const {
  auto ws = std::make_shared<MlpWorkspace>();
  return [spec = actor_spec_, params = actor_, ws](const Matrix& states, Matrix& actions) {
    mlp_forward_batch(spec, params, states, *ws);
    actions = ws->output();
  };
}

void Agent::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write(kAgentMagic.data(), kAgentMagic.size());
  checkpoint::write_u8(out, static_cast<std::uint8_t>(rule_));
  checkpoint::write_u64(out, steps_);
  checkpoint::write_u64(out, critic_updates_);
  checkpoint::write_u64(out, actor_updates_);
  checkpoint::write_network(out, actor_spec_, actor_);
  checkpoint::write_network(out, actor_spec_, target_actor_);
  checkpoint::write_optimizer(out, actor_opt_);
  checkpoint::write_u32(out, static_cast<std::uint32_t>(critic_count()));
  for (std::size_t i = 0; i < critic_count(); ++i) {
    checkpoint::write_network(out, critic_spec_, critics_[i]);
    checkpoint::write_network(out, critic_spec_, target_critics_[i]);
    checkpoint::write_optimizer(out, critic_opts_[i]);
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void Agent::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kAgentMagic) throw std::runtime_error(path.string() + " is not an agent checkpoint");
  if (checkpoint::read_u8(in) != static_cast<std::uint8_t>(rule_))
    throw UsageError("checkpoint was written for a different target rule");
  const auto steps = checkpoint::read_u64(in);
  const auto critic_updates = checkpoint::read_u64(in);
  const auto actor_updates = checkpoint::read_u64(in);
  auto expect = [](const MlpSpec& want, const std::pair<MlpSpec, ParamVector>& got) {
    if (!(want == got.first)) throw ShapeError("checkpoint network shape differs from the agent");
    return got.second;
  };
  ParamVector actor = expect(actor_spec_, checkpoint::read_network(in));
  ParamVector target_actor = expect(actor_spec_, checkpoint::read_network(in));
  OptimizerState actor_opt = checkpoint::read_optimizer(in);
  if (checkpoint::read_u32(in) != critic_count()) throw ShapeError("checkpoint critic count differs");
  std::vector<ParamVector> critics, targets;
  std::vector<OptimizerState> opts;
  for (std::size_t i = 0; i < critic_count(); ++i) {
    critics.push_back(expect(critic_spec_, checkpoint::read_network(in)));
    targets.push_back(expect(critic_spec_, checkpoint::read_network(in)));
    opts.push_back(checkpoint::read_optimizer(in));
  }
  actor_ = std::move(actor);
  target_actor_ = std::move(target_actor);
  actor_opt_ = std::move(actor_opt);
  critics_ = std::move(critics);
  target_critics_ = std::move(targets);
  critic_opts_ = std::move(opts);
  steps_ = steps;
  critic_updates_ = critic_updates;
  actor_updates_ = actor_updates;
}

double compute_target(TargetRule rule, const MlpSpec& critic_spec, std::span<const ParamVector> target_critics,
                      std::span<const double> next_state, std::span<const double> action, double reward,
                      double done_mask, double gamma) {
  if (target_critics.size() != critic_count(rule))
    throw UsageError(std::string(rule_name(rule)) + " needs " + std::to_string(critic_count(rule)) +
                     " target critics, got " + std::to_string(target_critics.size()));
  std::vector<double> input(next_state.begin(), next_state.end());
  input.insert(input.end(), action.begin(), action.end());
  std::array<double, 3> q{};
  for (std::size_t i = 0; i < target_critics.size(); ++i) q[i] = mlp_forward(critic_spec, target_critics[i], input)[0];
  return td_target(rule, std::span<const double>(q.data(), target_critics.size()), reward, done_mask, gamma);
}

}  // namespace tricritic
