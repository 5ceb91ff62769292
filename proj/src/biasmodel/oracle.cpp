#include "tricritic/biasmodel/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "tricritic/errors.hpp"
#include "tricritic/rng.hpp"

namespace tricritic::bias {
namespace {

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
};

Moments run_chunk(const GaussianErrorModel& m, EstimatorKind kind, std::size_t count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double c = std::sqrt(std::max(0.0, 1.0 - m.rho * m.rho));
  const double c3 = std::sqrt(std::max(0.0, 1.0 - m.rho3 * m.rho3));
  Moments acc;
  for (std::size_t i = 0; i < count; ++i) {
    const double z1 = gauss(rng);
    const double z2 = gauss(rng);
    const double w2 = m.rho * z1 + c * z2;  // standardised G2
    const double g1 = m.eps1 + m.sigma1 * z1;
    const double g2 = m.eps2 + m.sigma2 * w2;
    double value = 0.0;
    switch (kind) {
      case EstimatorKind::Single:
        value = g1;
        break;
      case EstimatorKind::MinOfTwo:
        value = std::min(g1, g2);
        break;
      case EstimatorKind::MaxOfTwo:
        value = std::max(g1, g2);
        break;
      case EstimatorKind::MinMaxMin: {
        const double g3 = m.eps2 + m.sigma2 * (m.rho3 * w2 + c3 * gauss(rng));
        value = std::min(std::max(g1, g2), g3);
        break;
      }
    }
    acc.add(value);
  }
  return acc;
}

}  // namespace

OracleEstimate mc_bias_oracle(const GaussianErrorModel& model, EstimatorKind kind, std::size_t n_samples,
                              std::uint64_t seed, unsigned workers) {
  model.validate();
  if (n_samples < 1000) throw DomainError("oracle needs at least 1000 samples");
  const std::size_t chunks = (n_samples + kOracleChunk - 1) / kOracleChunk;
  std::vector<Moments> partial(chunks);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t c = first; c < chunks; c += stride) {
      const std::size_t count = std::min(kOracleChunk, n_samples - c * kOracleChunk);
      partial[c] = run_chunk(model, kind, count, derive_seed(seed, "oracle-chunk", c));
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& t : pool) t.join();
  }
  Moments total;
  for (const auto& p : partial) total.merge(p);
  const double variance = total.n > 1.0 ? total.m2 / (total.n - 1.0) : 0.0;
  return {total.mean, std::sqrt(variance / total.n), n_samples};
}

}  // namespace tricritic::bias
