#include "tricritic/envs/reacher.hpp"

#include <algorithm>
#include <cmath>

#include "tricritic/rng.hpp"

namespace tricritic {

ReacherEnv::ReacherEnv() : spec_{6, 2, 1.0, kMaxSteps} {}

std::vector<double> ReacherEnv::observation() const {
  return {pos_[0], pos_[1], goal_[0], goal_[1], vel_[0], vel_[1]};
}

std::vector<double> ReacherEnv::reset(std::uint64_t seed) {
  Rng rng = make_rng(derive_seed(seed, "reacher-reset"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  pos_ = {unit(rng), unit(rng)};
  do {
    goal_ = {unit(rng), unit(rng)};
  } while (std::hypot(goal_[0] - pos_[0], goal_[1] - pos_[1]) < kMinStartDistance);
  vel_ = {0.0, 0.0};
  clock_.start();
  return observation();
}

std::vector<double> ReacherEnv::set_state(std::array<double, 2> position, std::array<double, 2> goal,
                                          std::array<double, 2> velocity) {
  pos_ = position;
  goal_ = goal;
  vel_ = velocity;
  clock_.start();
  return observation();
}

StepResult ReacherEnv::step(std::span<const double> action) {
  clock_.require_active(id());
  const std::vector<double> force = clamp_action(action, spec_);
  for (int axis = 0; axis < 2; ++axis) {
    double v = vel_[axis] + (force[axis] - kDamping * vel_[axis]) * kDt;
    v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
    double p = pos_[axis] + v * kDt;
    if (p < 0.0 || p > 1.0) {
      p = std::clamp(p, 0.0, 1.0);
      v = 0.0;
    }
    pos_[axis] = p;
    vel_[axis] = v;
  }
  const double dist = std::hypot(pos_[0] - goal_[0], pos_[1] - goal_[1]);
  StepResult result{observation(), -dist, false, false};
  if (dist < kCaptureRadius) {
    result.reward += kCaptureBonus;
    result.done = true;
  }
  const bool limit = clock_.tick(spec_.max_episode_steps);
  result.truncated = limit && !result.done;
  if (result.done || result.truncated) clock_.finish();
  return result;
}

double ReacherEnv::reward_bound() const { return std::sqrt(2.0) + kCaptureBonus; }

}  // namespace tricritic
