#include <cstdlib>
#include <string>

#include "tricritic/simd/kernels.hpp"

namespace tricritic::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend select_backend() {
  if (const char* forced = std::getenv("TRICRITIC_SIMD"); forced && std::string(forced) == "scalar")
    return Backend::Scalar;
  return backend_available(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

bool backend_available(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return avx2_kernels() != nullptr && cpu_has_avx2();
  }
  return false;
}

const KernelTable& kernels_for(Backend backend) {
  if (backend == Backend::Avx2 && backend_available(Backend::Avx2)) return *avx2_kernels();
  return scalar_kernels();
}

Backend active_backend() {
  static const Backend backend = select_backend();
  return backend;
}

const KernelTable& kernels() {
  static const KernelTable& table = kernels_for(active_backend());
  return table;
}

std::string_view backend_name(Backend backend) {
  return backend == Backend::Avx2 ? "avx2" : "scalar";
}

}  // namespace tricritic::simd
