#include "tricritic/envs/registry.hpp"

#include "tricritic/envs/pendulum.hpp"
#include "tricritic/envs/reacher.hpp"
#include "tricritic/errors.hpp"

namespace tricritic {

std::vector<std::string> env_ids() { return {"pendulum", "reacher"}; }

std::unique_ptr<Env> make_env(const std::string& id) {
  if (id == "pendulum") return std::make_unique<PendulumEnv>();
  if (id == "reacher") return std::make_unique<ReacherEnv>();
  throw ConfigError("unknown environment '" + id + "' (expected pendulum or reacher)");
}

EnvFactory env_factory(const std::string& id, const RewardTransform& transform, std::uint64_t transform_seed) {
  make_env(id);  // validates the id eagerly
  transform.validate();
  return [id, transform, transform_seed]() -> std::unique_ptr<Env> {
    auto env = make_env(id);
    if (transform.is_identity()) return env;
    return wrap_reward(std::move(env), transform, transform_seed);
  };
}

}  // namespace tricritic
