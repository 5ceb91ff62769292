#include "tricritic/simd/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cmath>

namespace tricritic::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// Every output of gemm_nt goes through the same sequence: 4-lane fma over the
// k/4 body, fixed-order horizontal sum, then scalar fma over the tail. The
// blocked paths below only share loads, so the blocking never changes bits.
inline double dot(const double* a, const double* b, std::size_t k) {
  const std::size_t body = k & ~std::size_t{3};
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t p = 0; p < body; p += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + p), _mm256_loadu_pd(b + p), acc);
  double sum = hsum(acc);
  for (std::size_t p = body; p < k; ++p) sum = std::fma(a[p], b[p], sum);
  return sum;
}

inline void store(double* c, double v, bool accumulate) { *c = accumulate ? *c + v : v; }

void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
             double* c, bool accumulate) {
  const std::size_t body = k & ~std::size_t{3};
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * k;
    const double* a1 = a0 + k;
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const double* b0 = b + j * k;
      const double* b1 = b0 + k;
      const double* b2 = b1 + k;
      const double* b3 = b2 + k;
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c02 = _mm256_setzero_pd(), c03 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c12 = _mm256_setzero_pd(), c13 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < body; p += 4) {
        const __m256d x0 = _mm256_loadu_pd(a0 + p);
        const __m256d x1 = _mm256_loadu_pd(a1 + p);
        __m256d w = _mm256_loadu_pd(b0 + p);
        c00 = _mm256_fmadd_pd(x0, w, c00);
        c10 = _mm256_fmadd_pd(x1, w, c10);
        w = _mm256_loadu_pd(b1 + p);
        c01 = _mm256_fmadd_pd(x0, w, c01);
        c11 = _mm256_fmadd_pd(x1, w, c11);
        w = _mm256_loadu_pd(b2 + p);
        c02 = _mm256_fmadd_pd(x0, w, c02);
        c12 = _mm256_fmadd_pd(x1, w, c12);
        w = _mm256_loadu_pd(b3 + p);
        c03 = _mm256_fmadd_pd(x0, w, c03);
        c13 = _mm256_fmadd_pd(x1, w, c13);
      }
      double s[8] = {hsum(c00), hsum(c01), hsum(c02), hsum(c03),
                     hsum(c10), hsum(c11), hsum(c12), hsum(c13)};
      for (std::size_t p = body; p < k; ++p) {
        s[0] = std::fma(a0[p], b0[p], s[0]);
        s[1] = std::fma(a0[p], b1[p], s[1]);
        s[2] = std::fma(a0[p], b2[p], s[2]);
        s[3] = std::fma(a0[p], b3[p], s[3]);
        s[4] = std::fma(a1[p], b0[p], s[4]);
        s[5] = std::fma(a1[p], b1[p], s[5]);
        s[6] = std::fma(a1[p], b2[p], s[6]);
        s[7] = std::fma(a1[p], b3[p], s[7]);
      }
      double* r0 = c + i * n + j;
      double* r1 = r0 + n;
      for (int q = 0; q < 4; ++q) {
        store(r0 + q, s[q], accumulate);
        store(r1 + q, s[4 + q], accumulate);
      }
    }
    for (; j < n; ++j) {
      store(c + i * n + j, dot(a0, b + j * k, k), accumulate);
      store(c + (i + 1) * n + j, dot(a1, b + j * k, k), accumulate);
    }
  }
  for (; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) store(c + i * n + j, dot(a + i * k, b + j * k, k), accumulate);
}

// Shared register-blocked update: c_row[j..] += sum_p coef(p) * b[p][j..], with
// the row of c held in registers across the whole p loop.
template <typename Coef>
inline void axpy_rows(std::size_t n, std::size_t k, Coef coef, const double* b, double* crow) {
  std::size_t j = 0;
  for (; j + 16 <= n; j += 16) {
    __m256d r0 = _mm256_loadu_pd(crow + j);
    __m256d r1 = _mm256_loadu_pd(crow + j + 4);
    __m256d r2 = _mm256_loadu_pd(crow + j + 8);
    __m256d r3 = _mm256_loadu_pd(crow + j + 12);
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d s = _mm256_set1_pd(coef(p));
      const double* brow = b + p * n + j;
      r0 = _mm256_fmadd_pd(s, _mm256_loadu_pd(brow), r0);
      r1 = _mm256_fmadd_pd(s, _mm256_loadu_pd(brow + 4), r1);
      r2 = _mm256_fmadd_pd(s, _mm256_loadu_pd(brow + 8), r2);
      r3 = _mm256_fmadd_pd(s, _mm256_loadu_pd(brow + 12), r3);
    }
    _mm256_storeu_pd(crow + j, r0);
    _mm256_storeu_pd(crow + j + 4, r1);
    _mm256_storeu_pd(crow + j + 8, r2);
    _mm256_storeu_pd(crow + j + 12, r3);
  }
  for (; j + 4 <= n; j += 4) {
    __m256d r = _mm256_loadu_pd(crow + j);
    for (std::size_t p = 0; p < k; ++p)
      r = _mm256_fmadd_pd(_mm256_set1_pd(coef(p)), _mm256_loadu_pd(b + p * n + j), r);
    _mm256_storeu_pd(crow + j, r);
  }
  for (; j < n; ++j) {
    double r = crow[j];
    for (std::size_t p = 0; p < k; ++p) r = std::fma(coef(p), b[p * n + j], r);
    crow[j] = r;
  }
}

void gemm_nn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    axpy_rows(n, k, [arow](std::size_t p) { return arow[p]; }, b, c + i * n);
  }
}

void gemm_tn_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                 double* c) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* acol = a + i;
    axpy_rows(n, k, [acol, m](std::size_t p) { return acol[p * m]; }, b, c + i * n);
  }
}

void adam_update(std::size_t n, double* params, double* first, double* second, const double* grads,
                 double beta1, double beta2, double step_size, double denom_scale, double epsilon) {
  const __m256d b1 = _mm256_set1_pd(beta1);
  const __m256d b2 = _mm256_set1_pd(beta2);
  const __m256d ob1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d ob2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d lr = _mm256_set1_pd(step_size);
  const __m256d ds = _mm256_set1_pd(denom_scale);
  const __m256d eps = _mm256_set1_pd(epsilon);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grads + i);
    const __m256d m = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(first + i)), _mm256_mul_pd(ob1, g));
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(second + i)),
                                    _mm256_mul_pd(_mm256_mul_pd(ob2, g), g));
    _mm256_storeu_pd(first + i, m);
    _mm256_storeu_pd(second + i, v);
    const __m256d denom = _mm256_add_pd(_mm256_mul_pd(_mm256_sqrt_pd(v), ds), eps);
    const __m256d upd = _mm256_div_pd(_mm256_mul_pd(lr, m), denom);
    _mm256_storeu_pd(params + i, _mm256_sub_pd(_mm256_loadu_pd(params + i), upd));
  }
  for (; i < n; ++i) {
    const double g = grads[i];
    first[i] = beta1 * first[i] + (1.0 - beta1) * g;
    second[i] = beta2 * second[i] + ((1.0 - beta2) * g) * g;
    params[i] -= (step_size * first[i]) / (std::sqrt(second[i]) * denom_scale + epsilon);
  }
}

void polyak(std::size_t n, double* target, const double* source, double tau) {
  const __m256d t = _mm256_set1_pd(tau);
  const __m256d ot = _mm256_set1_pd(1.0 - tau);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(t, _mm256_loadu_pd(source + i)),
                                    _mm256_mul_pd(ot, _mm256_loadu_pd(target + i)));
    _mm256_storeu_pd(target + i, v);
  }
  for (; i < n; ++i) target[i] = tau * source[i] + (1.0 - tau) * target[i];
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{gemm_nt, gemm_nn_acc, gemm_tn_acc, adam_update, polyak};
  return &table;
}

}  // namespace tricritic::simd

#else

namespace tricritic::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace tricritic::simd

#endif
