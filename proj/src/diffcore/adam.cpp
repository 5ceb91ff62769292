#include "tricritic/diffcore/adam.hpp"

#include <cmath>

#include "tricritic/errors.hpp"
#include "tricritic/simd/kernels.hpp"

namespace tricritic {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
}

OptimizerState make_optimizer(std::size_t param_count, AdamConfig config) {
  config.validate();
  return {0, std::vector<double>(param_count, 0.0), std::vector<double>(param_count, 0.0), config};
}

void adam_step(OptimizerState& state, ParamVector& params, const ParamVector& grads) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.first_moment.size() != n || state.second_moment.size() != n)
    throw ShapeError("optimizer, parameter and gradient lengths differ");
  if (!grads.all_finite()) throw NumericError("non-finite gradient; optimizer step skipped");

  const auto& c = state.config;
  const double t = static_cast<double>(state.step_count + 1);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  simd::kernels().adam_update(n, params.data(), state.first_moment.data(), state.second_moment.data(),
                              grads.data(), c.beta1, c.beta2, c.learning_rate / bc1, 1.0 / std::sqrt(bc2),
                              c.epsilon);
  ++state.step_count;
}

}  // namespace tricritic
