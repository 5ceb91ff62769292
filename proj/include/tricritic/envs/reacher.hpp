#pragma once

#include <array>

#include "tricritic/envs/env.hpp"

namespace tricritic {

// Planar point mass reaching a goal inside the unit box.
//
// Observation [x, y, goal_x, goal_y, vx, vy]; action is a 2-D force in [-1, 1]^2.
// Per step (dt = 0.1, unit mass, linear damping 1):
//   v' = clamp(v + (f - v) dt, -1, 1) per axis
//   p' = p + v' dt, clamped to [0, 1] (the velocity component is zeroed on contact)
//   d  = |p' - goal|;  reward = -d, plus 1 and done when d < 0.05.
// Reset: agent and goal uniform in the unit box, at least 0.1 apart, v = 0.
class ReacherEnv final : public Env {
 public:
  static constexpr double kDt = 0.1;
  static constexpr double kDamping = 1.0;
  static constexpr double kMaxSpeed = 1.0;
  static constexpr double kCaptureRadius = 0.05;
  static constexpr double kCaptureBonus = 1.0;
  static constexpr double kMinStartDistance = 0.1;
  static constexpr std::size_t kMaxSteps = 200;

  ReacherEnv();

  const EnvSpec& spec() const override { return spec_; }
  std::string id() const override { return "reacher"; }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  double reward_bound() const override;

  std::vector<double> set_state(std::array<double, 2> position, std::array<double, 2> goal,
                                std::array<double, 2> velocity = {0.0, 0.0});
  std::vector<double> observation() const;

 private:
  EnvSpec spec_;
  EpisodeClock clock_;
  std::array<double, 2> pos_{};
  std::array<double, 2> goal_{};
  std::array<double, 2> vel_{};
};

}  // namespace tricritic
