#pragma once

#include <cstddef>
#include <cstdint>

namespace tricritic {

struct GradcheckResult {
  std::size_t trials = 0;
  std::size_t coordinates = 0;  // total coordinates checked
  double max_critic_rel_error = 0.0;
  double max_actor_rel_error = 0.0;
};

// Central-difference checks of the critic-loss and actor-objective gradients
// on randomly shaped tanh networks and random batches. Relative error is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradcheckResult run_gradcheck(std::size_t trials, std::uint64_t seed, std::size_t coords_per_trial = 16);

}  // namespace tricritic
