#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace pptaxis::kernels {

const KernelTable* avx2_table() {
#if defined(PPTAXIS_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_unchecked() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [&]() -> const KernelTable& {
    const char* env = std::getenv("PPTAXIS_KERNELS");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return scalar_table();
    if (const KernelTable* simd = avx2_table()) return *simd;
    return scalar_table();
  }();
  return chosen;
}

}  // namespace pptaxis::kernels
