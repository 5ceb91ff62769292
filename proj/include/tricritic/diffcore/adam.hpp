#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tricritic/diffcore/mlp.hpp"

namespace tricritic {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct OptimizerState {
  std::uint64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  AdamConfig config;

  friend bool operator==(const OptimizerState&, const OptimizerState&) = default;
};

OptimizerState make_optimizer(std::size_t param_count, AdamConfig config = {});

// One bias-corrected Adam step. Non-finite gradients throw NumericError and
// leave both state and params untouched.
void adam_step(OptimizerState& state, ParamVector& params, const ParamVector& grads);

}  // namespace tricritic
