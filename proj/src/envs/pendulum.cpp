#include "tricritic/envs/pendulum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {

void EnvSpec::validate() const {
  if (state_dim < 1 || action_dim < 1) throw ConfigError("env dimensions must be >= 1");
  if (!(action_bound > 0.0)) throw ConfigError("env action bound must be positive");
  if (max_episode_steps < 1) throw ConfigError("env max_episode_steps must be >= 1");
}

void EpisodeClock::require_active(const std::string& env_id) const {
  if (!active_) throw UsageError(env_id + ": step() called without reset() after the episode ended");
}

bool EpisodeClock::tick(std::size_t max_steps) {
  ++steps_;
  return steps_ >= max_steps;
}

std::vector<double> clamp_action(std::span<const double> action, const EnvSpec& spec) {
  if (action.size() != spec.action_dim)
    throw ShapeError("action length " + std::to_string(action.size()) + ", expected " +
                     std::to_string(spec.action_dim));
  std::vector<double> out(action.begin(), action.end());
  for (double& a : out) {
    if (!std::isfinite(a)) throw NumericError("non-finite action");
    a = std::clamp(a, -spec.action_bound, spec.action_bound);
  }
  return out;
}

double wrap_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

PendulumEnv::PendulumEnv() : spec_{3, 1, kMaxTorque, kMaxSteps} {}

std::vector<double> PendulumEnv::observation() const {
  return {std::cos(theta_), std::sin(theta_), omega_};
}

std::vector<double> PendulumEnv::reset(std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "pendulum-reset"));
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> speed(-1.0, 1.0);
  theta_ = angle(rng);
  omega_ = speed(rng);
  clock_.start();
  return observation();
}

std::vector<double> PendulumEnv::set_state(double theta, double omega) {
  theta_ = wrap_angle(theta);
  omega_ = std::clamp(omega, -kMaxSpeed, kMaxSpeed);
  clock_.start();
  return observation();
}

StepResult PendulumEnv::step(std::span<const double> action) {
  clock_.require_active(id());
  const double u = clamp_action(action, spec_)[0];
  const double th = wrap_angle(theta_);
  const double reward = -(th * th + 0.1 * omega_ * omega_ + 0.001 * u * u);

  const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) + 3.0 / (kMass * kLength * kLength) * u;
  omega_ = std::clamp(omega_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  theta_ = wrap_angle(theta_ + omega_ * kDt);

  StepResult result{observation(), reward, false, clock_.tick(spec_.max_episode_steps)};
  if (result.truncated) clock_.finish();
  return result;
}

double PendulumEnv::reward_bound() const {
  return std::numbers::pi * std::numbers::pi + 0.1 * kMaxSpeed * kMaxSpeed + 0.001 * kMaxTorque * kMaxTorque;
}

}  // namespace tricritic
