#pragma once

// Data-parallel inner loops of the network code. Every kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2+FMA
// variant selected once at startup. Results agree to rounding; within one
// backend they are bit-reproducible and each output row of the gemm kernels
// depends only on its own input row (batch composition never changes a row).

#include <cstddef>
#include <string_view>

namespace tricritic::simd {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  // c[m][n] = (accumulate ? c[m][n] : 0) + sum_k a[m][k] * b[n][k]
  // a: m x k, b: n x k, c: m x n, all row-major.
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c, bool accumulate);
  // c[m][n] += sum_k a[m][k] * b[k][n]      a: m x k, b: k x n
  void (*gemm_nn_acc)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                      double* c);
  // c[m][n] += sum_k a[k][m] * b[k][n]      a: k x m, b: k x n
  void (*gemm_tn_acc)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                      double* c);
  // Bias-corrected adaptive-moment update over n parameters.
  // step_size = lr / (1 - beta1^t), denom_scale = 1 / sqrt(1 - beta2^t).
  void (*adam_update)(std::size_t n, double* params, double* first, double* second,
                      const double* grads, double beta1, double beta2, double step_size,
                      double denom_scale, double epsilon);
  // target = tau * source + (1 - tau) * target
  void (*polyak)(std::size_t n, double* target, const double* source, double tau);
};

const KernelTable& scalar_kernels();
// Null when the binary was built without AVX2 support.
const KernelTable* avx2_kernels();

bool backend_available(Backend backend);
const KernelTable& kernels_for(Backend backend);

// Backend chosen at first use: AVX2 when the CPU reports avx2 and fma,
// otherwise scalar. TRICRITIC_SIMD=scalar forces the reference path.
Backend active_backend();
const KernelTable& kernels();

std::string_view backend_name(Backend backend);

}  // namespace tricritic::simd
