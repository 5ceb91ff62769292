#include "tricritic/simd/kernels.hpp"

#include <cmath>

namespace tricritic::simd {
namespace {

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double sum = 0.0;
      for (std::size_t p = 0; p < k; ++p) sum += arow[p] * brow[p];
      c[i * n + j] = accumulate ? c[i * n + j] + sum : sum;
    }
  }
}

void gemm_nn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void adam_update(std::size_t n, double* params, double* first, double* second, const double* grads,
                 double beta1, double beta2, double step_size, double denom_scale, double epsilon) {
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    first[i] = beta1 * first[i] + (1.0 - beta1) * g;
    second[i] = beta2 * second[i] + (1.0 - beta2) * g * g;
    params[i] -= step_size * first[i] / (std::sqrt(second[i]) * denom_scale + epsilon);
  }
}

void polyak(std::size_t n, double* target, const double* source, double tau) {
  for (std::size_t i = 0; i < n; ++i) target[i] = tau * source[i] + (1.0 - tau) * target[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{gemm_nt, gemm_nn_acc, gemm_tn_acc, adam_update, polyak};
  return table;
}

}  // namespace tricritic::simd
