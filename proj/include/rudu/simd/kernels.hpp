#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Double-precision vector kernels used by the network's dense inner loops.
// Every kernel has a scalar reference implementation; wider variants are
// compiled per ISA and picked at runtime. RUDU_SIMD=scalar|avx2|neon in the
// environment overrides the automatic choice.

namespace rudu::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

/// True when the ISA was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// Kernel table for a specific ISA; throws if unavailable.
const KernelTable& kernels_for(Isa isa);

/// Active table; resolved once on first use.
const KernelTable& active_kernels();
Isa active_isa();

/// Switches the active table (tests and benchmarking).
void set_active_isa(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active_kernels().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active_kernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace rudu::simd
