#include "tricritic/biasmodel/gaussian_bias.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tricritic/errors.hpp"

namespace tricritic::bias {
namespace {

const double kSqrt2Pi = std::sqrt(2.0 * std::numbers::pi);

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }
double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

void GaussianErrorModel::validate() const {
  if (!std::isfinite(eps1) || !std::isfinite(eps2)) throw DomainError("error means must be finite");
  if (!(sigma1 > 0.0) || !(sigma2 > 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2))
    throw DomainError("error standard deviations must be positive and finite");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("rho must lie in [-1, 1]");
  if (!(rho3 >= -1.0 && rho3 <= 1.0)) throw DomainError("rho3 must lie in [-1, 1]");
  if (paper_regime && !(eps1 >= eps2 && eps2 >= 0.0)) throw DomainError("analysed regime requires eps1 >= eps2 >= 0");
}

std::string_view estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Single:
      return "single";
    case EstimatorKind::MinOfTwo:
      return "min";
    case EstimatorKind::MaxOfTwo:
      return "max";
    case EstimatorKind::MinMaxMin:
      return "minmaxmin";
  }
  return "unknown";
}

EstimatorKind parse_estimator(std::string_view name) {
  if (name == "single") return EstimatorKind::Single;
  if (name == "min") return EstimatorKind::MinOfTwo;
  if (name == "max") return EstimatorKind::MaxOfTwo;
  if (name == "minmaxmin" || name == "triplet") return EstimatorKind::MinMaxMin;
  throw ConfigError("unknown estimator '" + std::string(name) + "' (single, min, max, minmaxmin)");
}

double theta_combo(const GaussianErrorModel& m) {
  const double radicand = m.sigma1 * m.sigma1 + m.sigma2 * m.sigma2 - 2.0 * m.rho * m.sigma1 * m.sigma2;
  // Non-negative for |rho| <= 1; rounding can leave a tiny negative at rho = 1.
  return std::sqrt(std::max(radicand, 0.0));
}

double clipped_double_bias(const GaussianErrorModel& m) {
  return 0.5 * (m.eps1 + m.eps2) - theta_combo(m) / kSqrt2Pi;
}

double triplet_bias_direct(const GaussianErrorModel& m) {
  return (m.eps1 + 3.0 * m.eps2) / 4.0 - theta_combo(m) / (2.0 * kSqrt2Pi);
}

double triplet_bias_from_pair(const GaussianErrorModel& m) { return 0.5 * (clipped_double_bias(m) + m.eps2); }

double triplet_bias(const GaussianErrorModel& m) {
  const double direct = triplet_bias_direct(m);
  const double via_pair = triplet_bias_from_pair(m);
  if (std::abs(direct - via_pair) > 1e-12 * std::max(1.0, std::abs(direct)))
    throw std::logic_error("triplet bias forms disagree");
  return direct;
}

double underestimation_threshold(double eps1, double rho) {
  if (!(rho >= -1.0 && rho < 1.0)) throw DomainError("threshold undefined for rho outside [-1, 1)");
  if (!(eps1 >= 0.0)) throw DomainError("threshold requires eps1 >= 0");
  return std::sqrt(std::numbers::pi / (1.0 - rho)) * eps1;
}

double min_of_two_exact(const GaussianErrorModel& m) {
  const double theta = theta_combo(m);
  if (theta == 0.0) return std::min(m.eps1, m.eps2);
  const double b = (m.eps2 - m.eps1) / theta;
  return m.eps1 * normal_cdf(b) + m.eps2 * normal_cdf(-b) - theta * normal_pdf(b);
}

double max_of_two_exact(const GaussianErrorModel& m) { return m.eps1 + m.eps2 - min_of_two_exact(m); }

}  // namespace tricritic::bias
