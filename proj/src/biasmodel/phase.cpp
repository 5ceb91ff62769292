#include "tricritic/biasmodel/phase.hpp"

#include "tricritic/rng.hpp"

namespace tricritic::bias {

std::vector<PhasePoint> phase_diagram(const PhaseGrid& grid, unsigned workers) {
  std::vector<PhasePoint> points;
  std::uint64_t index = 0;
  for (double e1 : grid.eps1)
    for (double e2 : grid.eps2)
      for (double s : grid.sigma)
        for (double r : grid.rho) {
          PhasePoint p;
          p.model = {e1, e2, s, s, r};
          p.model.validate();
          const std::uint64_t seed = derive_seed(grid.seed, "phase-point", index++);
          p.closed_pair = clipped_double_bias(p.model);
          p.closed_triplet = triplet_bias(p.model);
          p.oracle_pair = mc_bias_oracle(p.model, EstimatorKind::MinOfTwo, grid.samples, seed, workers);
          p.oracle_triplet = mc_bias_oracle(p.model, EstimatorKind::MinMaxMin, grid.samples, seed, workers);
          points.push_back(p);
        }
  return points;
}

}  // namespace tricritic::bias
