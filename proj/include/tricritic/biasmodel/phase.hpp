#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tricritic/biasmodel/oracle.hpp"

namespace tricritic::bias {

// Cartesian grid over (eps1, eps2, sigma, rho) with sigma1 = sigma2 = sigma.
struct PhaseGrid {
  std::vector<double> eps1 = {0.0, 0.1, 0.5};
  std::vector<double> eps2 = {0.0, 0.1};
  std::vector<double> sigma = {0.2, 1.0, 3.0};
  std::vector<double> rho = {-0.5, 0.0, 0.5, 0.9};
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 0;
};

struct PhasePoint {
  GaussianErrorModel model;
  double closed_pair = 0.0;
  double closed_triplet = 0.0;
  OracleEstimate oracle_pair;
  OracleEstimate oracle_triplet;
};

// Point i (eps1 outermost, rho innermost) draws both oracles from
// derive_seed(seed, "phase-point", i).
std::vector<PhasePoint> phase_diagram(const PhaseGrid& grid, unsigned workers = 1);

}  // namespace tricritic::bias
