#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// optional AVX2 variants. The active variant is picked once at startup from
// CPUID; AEQ_ISA=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace aeq::kernels {

enum class Isa { scalar, avx2 };

struct KernelTable {
  /// out[i] += a[i] * b[i]
  void (*multiply_accumulate)(double* out, const double* a, const double* b, std::size_t n);
  /// out[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* out, std::size_t n);
  /// acc[i] += x[i] * x[i]
  void (*accumulate_square)(double* acc, const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// max_i x[i]; -inf for n == 0
  double (*max_value)(const double* x, std::size_t n);
  /// max_i |a[i] - b[i]|
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(AEQ_WITH_AVX2)
const KernelTable& avx2_table();
#endif

bool isa_available(Isa isa);
Isa active_isa();
std::string_view isa_name(Isa isa);
const KernelTable& table(Isa isa);
const KernelTable& active();

inline void multiply_accumulate(std::span<double> out, std::span<const double> a,
                                std::span<const double> b) {
  active().multiply_accumulate(out.data(), a.data(), b.data(), out.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> out) {
  active().axpy(alpha, x.data(), out.data(), out.size());
}
inline void accumulate_square(std::span<double> acc, std::span<const double> x) {
  active().accumulate_square(acc.data(), x.data(), acc.size());
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double max_value(std::span<const double> x) { return active().max_value(x.data(), x.size()); }
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace aeq::kernels
