#pragma once

#include <optional>

#include "tricritic/envs/env.hpp"
#include "tricritic/rng.hpp"

namespace tricritic {

// Emitted reward = scale * r' + eta, eta ~ N(0, additive_noise_std^2), where
// r' = 0 if r < sparsify_threshold and r otherwise.
struct RewardTransform {
  double scale = 1.0;
  double additive_noise_std = 0.0;
  std::optional<double> sparsify_threshold;

  void validate() const;
  bool is_identity() const { return scale == 1.0 && additive_noise_std == 0.0 && !sparsify_threshold; }
  friend bool operator==(const RewardTransform&, const RewardTransform&) = default;
};

// Changes rewards only; states, termination and truncation pass through.
// The noise stream is reseeded from (wrapper seed, episode seed) on reset.
class RewardWrapper final : public Env {
 public:
  RewardWrapper(std::unique_ptr<Env> base, RewardTransform transform, std::uint64_t seed);

  const EnvSpec& spec() const override { return base_->spec(); }
  std::string id() const override { return base_->id(); }
  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  double reward_bound() const override;

  const RewardTransform& transform() const { return transform_; }
  Env& base() { return *base_; }

 private:
  std::unique_ptr<Env> base_;
  RewardTransform transform_;
  std::uint64_t seed_;
  Rng noise_;
  std::normal_distribution<double> noise_dist_;
};

std::unique_ptr<Env> wrap_reward(std::unique_ptr<Env> base, const RewardTransform& transform,
                                 std::uint64_t seed);

}  // namespace tricritic
