#include "tricritic/envs/reward_wrapper.hpp"

#include <cmath>

#include "tricritic/errors.hpp"

namespace tricritic {

void RewardTransform::validate() const {
  if (!std::isfinite(scale) || scale == 0.0) throw ConfigError("reward scale must be finite and nonzero");
  if (!(additive_noise_std >= 0.0) || !std::isfinite(additive_noise_std))
    throw ConfigError("reward noise_std must be finite and >= 0");
  if (sparsify_threshold && !std::isfinite(*sparsify_threshold))
    throw ConfigError("reward sparsify_threshold must be finite");
}

RewardWrapper::RewardWrapper(std::unique_ptr<Env> base, RewardTransform transform, std::uint64_t seed)
    : base_(std::move(base)), transform_(transform), seed_(seed), noise_(make_rng(seed)),
      noise_dist_(0.0, transform.additive_noise_std > 0.0 ? transform.additive_noise_std : 1.0) {
  if (!base_) throw ConfigError("reward wrapper needs a base environment");
  transform_.validate();
}

std::vector<double> RewardWrapper::reset(std::uint64_t seed) {
  noise_ = make_rng(derive_seed(seed_, "reward-noise", seed));
  noise_dist_ = std::normal_distribution<double>(0.0, transform_.additive_noise_std > 0.0 ? transform_.additive_noise_std : 1.0);
  return base_->reset(seed);
}

StepResult RewardWrapper::step(std::span<const double> action) {
  StepResult r = base_->step(action);
  double reward = r.reward;
  if (transform_.sparsify_threshold && reward < *transform_.sparsify_threshold) reward = 0.0;
  reward *= transform_.scale;
  if (transform_.additive_noise_std > 0.0) {
    reward += noise_dist_(noise_);
  }
  r.reward = reward;
  return r;
}

double RewardWrapper::reward_bound() const { return std::abs(transform_.scale) * base_->reward_bound(); }

std::unique_ptr<Env> wrap_reward(std::unique_ptr<Env> base, const RewardTransform& transform,
                                 std::uint64_t seed) {
  return std::make_unique<RewardWrapper>(std::move(base), transform, seed);
}

}  // namespace tricritic
