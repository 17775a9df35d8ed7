#include <cstdlib>
#include <cstring>

#include "aeq/kernels.hpp"

namespace aeq::kernels {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(AEQ_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa chosen = [] {
    const char* forced = std::getenv("AEQ_ISA");
    if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::scalar;
    return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
  }();
  return chosen;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

const KernelTable& table(Isa isa) {
#if defined(AEQ_WITH_AVX2)
  if (isa == Isa::avx2 && isa_available(Isa::avx2)) return avx2_table();
#endif
  (void)isa;
  return scalar_table();
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace aeq::kernels
