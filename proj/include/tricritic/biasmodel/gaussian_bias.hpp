#pragma once

// Expected estimation error of critic-combination rules when each critic's
// error is Gaussian: G1 ~ N(eps1, sigma1^2), G2 ~ N(eps2, sigma2^2) with
// correlation rho, and G3 sharing G2's marginal.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace tricritic::bias {

struct GaussianErrorModel {
  double eps1 = 0.0;
  double eps2 = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double rho = 0.0;
  // Correlation of G3 with G2. The closed forms assume 0 (independent G3);
  // the Monte-Carlo oracle honours any value in [-1, 1].
  double rho3 = 0.0;
  // Restricts to the analysed regime eps1 >= eps2 >= 0.
  bool paper_regime = false;

  // Throws DomainError.
  void validate() const;
};

enum class EstimatorKind { Single, MinOfTwo, MaxOfTwo, MinMaxMin };

std::string_view estimator_name(EstimatorKind kind);
// "single", "min", "max", "minmaxmin"; throws ConfigError otherwise.
EstimatorKind parse_estimator(std::string_view name);

// sqrt(sigma1^2 + sigma2^2 - 2 rho sigma1 sigma2), the std of G1 - G2.
double theta_combo(const GaussianErrorModel& m);

// (eps1 + eps2) / 2 - theta / sqrt(2 pi). Exact when eps1 == eps2.
double clipped_double_bias(const GaussianErrorModel& m);

// (eps1 + 3 eps2) / 4 - theta / (2 sqrt(2 pi)), evaluated directly and as
// (clipped_double_bias + eps2) / 2; the two forms are checked against each
// other. Exact for iid errors (rho = 0, eps1 = eps2, sigma1 = sigma2).
double triplet_bias(const GaussianErrorModel& m);
double triplet_bias_direct(const GaussianErrorModel& m);
double triplet_bias_from_pair(const GaussianErrorModel& m);

// sqrt(pi / (1 - rho)) * eps1: in the symmetric regime (sigma1 = sigma2,
// eps1 = eps2) the min-of-two estimate is biased low once sigma exceeds it.
// Throws DomainError for rho >= 1, rho < -1 or eps1 < 0.
double underestimation_threshold(double eps1, double rho);

// Exact first moment of min(G1, G2) for arbitrary means:
// eps1 Phi(b) + eps2 Phi(-b) - theta phi(b), b = (eps2 - eps1) / theta.
double min_of_two_exact(const GaussianErrorModel& m);
double max_of_two_exact(const GaussianErrorModel& m);

}  // namespace tricritic::bias
