#pragma once

#include "tricritic/envs/env.hpp"

namespace tricritic {

// Torque-limited pendulum swing-up.
//
// theta = 0 is upright. Observation [cos theta, sin theta, omega].
// Reset: theta ~ U[-pi, pi), omega ~ U[-1, 1).
// Per step with u = clamp(action, -2, 2):
//   reward = -(wrap(theta)^2 + 0.1 omega^2 + 0.001 u^2)      (pre-step state)
//   omega' = clamp(omega + (3 g / (2 l) sin theta + 3 u / (m l^2)) dt, -8, 8)
//   theta' = wrap(theta + omega' dt)
// with g = 10, m = l = 1, dt = 0.05 and wrap() into (-pi, pi]. Never terminal;
// truncated after 200 steps.
class PendulumEnv final : public Env {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr std::size_t kMaxSteps = 200;

  PendulumEnv();

  const EnvSpec& spec() const override { return spec_; }
  std::string id() const override { return "pendulum"; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  double reward_bound() const override;

  // Places the pendulum at (theta, omega) and starts a fresh episode.
  std::vector<double> set_state(double theta, double omega);
  double theta() const { return theta_; }
  double omega() const { return omega_; }

  std::vector<double> observation() const;

 private:
  EnvSpec spec_;
  EpisodeClock clock_;
  double theta_ = 0.0;
  double omega_ = 0.0;
};

// Wraps an angle into (-pi, pi]; pi itself maps to pi.
double wrap_angle(double theta);

}  // namespace tricritic
