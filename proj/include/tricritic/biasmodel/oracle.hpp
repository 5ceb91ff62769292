#pragma once

#include <cstddef>
#include <cstdint>

#include "tricritic/biasmodel/gaussian_bias.hpp"

namespace tricritic::bias {

struct OracleEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Samples are processed in fixed chunks of this size; chunk c draws from its
// own stream derive_seed(seed, "oracle-chunk", c), and chunk statistics are
// merged in chunk order. The estimate is therefore the same for any worker count.
inline constexpr std::size_t kOracleChunk = 1u << 16;

// Draws (G1, G2) through the Cholesky factor of their 2x2 covariance and G3
// from N(eps2, sigma2^2) (correlated with G2 by rho3), applies the estimator
// and returns the sample mean with its standard error.
// Throws DomainError for invalid models or n_samples < 1000.
OracleEstimate mc_bias_oracle(const GaussianErrorModel& model, EstimatorKind kind, std::size_t n_samples,
                              std::uint64_t seed, unsigned workers = 1);

}  // namespace tricritic::bias
