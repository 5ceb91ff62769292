#pragma once

#include <string>
#include <vector>

#include "tricritic/envs/env.hpp"
#include "tricritic/envs/reward_wrapper.hpp"

namespace tricritic {

// Identifiers accepted by make_env: "pendulum", "reacher".
std::vector<std::string> env_ids();

// Throws ConfigError for unknown ids.
std::unique_ptr<Env> make_env(const std::string& id);

// Factory producing fresh instances; wraps with the transform unless it is the identity.
EnvFactory env_factory(const std::string& id, const RewardTransform& transform = {},
                       std::uint64_t transform_seed = 0);

}  // namespace tricritic
