#pragma once

// Expected values of min/max combinations of Gaussians by direct numerical
// integration, independent of any sampling.

#include <cmath>
#include <functional>
#include <numbers>

namespace quad {

inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// P(X <= u, Y <= v) for standard normals with correlation rho, |rho| < 1.
inline double bvn_cdf(double u, double v, double rho) {
  const double s = std::sqrt(1 - rho * rho);
  const double lo = -9.0;
  if (u <= lo) return 0.0;
  return simpson([&](double x) { return phi(x) * Phi((v - rho * x) / s); }, lo, u, 400);
}

struct Model {
  double e1, e2, s1, s2, rho;
};

// P(max(G1, G2) <= w)
inline double max_cdf(const Model& m, double w) {
  return bvn_cdf((w - m.e1) / m.s1, (w - m.e2) / m.s2, m.rho);
}

// E[V] = int_0^inf P(V > t) dt - int_-inf^0 P(V <= t) dt, given the survival function.
inline double mean_from_survival(const std::function<double(double)>& surv, double lo, double hi) {
  const int n = 800;
  double pos = hi > 0 ? simpson(surv, std::max(0.0, lo), hi, n) : 0.0;
  double neg = lo < 0 ? simpson([&](double t) { return 1.0 - surv(t); }, lo, std::min(0.0, hi), n) : 0.0;
  return pos - neg;
}

inline double range_lo(const Model& m) { return std::min(m.e1, m.e2) - 9 * std::max(m.s1, m.s2); }
inline double range_hi(const Model& m) { return std::max(m.e1, m.e2) + 9 * std::max(m.s1, m.s2); }

// E[min(G1, G2)]; P(min > t) = 1 - F1(t) - F2(t) + F12(t, t).
inline double mean_min2(const Model& m) {
  return mean_from_survival(
      [&](double t) {
        return 1.0 - Phi((t - m.e1) / m.s1) - Phi((t - m.e2) / m.s2) + max_cdf(m, t);
      },
      range_lo(m), range_hi(m));
}

// E[min(max(G1, G2), G3)] with G3 ~ N(e2, s2^2) independent.
inline double mean_minmaxmin(const Model& m) {
  return mean_from_survival([&](double t) { return (1.0 - max_cdf(m, t)) * (1.0 - Phi((t - m.e2) / m.s2)); },
                            range_lo(m), range_hi(m));
}

}  // namespace quad
