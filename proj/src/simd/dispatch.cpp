#include <atomic>
#include <cstdlib>
#include <string>

#include "rudu/error.hpp"
#include "rudu/simd/kernels.hpp"
#include "simd_variants.hpp"

namespace rudu::simd {

namespace {

constexpr KernelTable kScalar{&scalar::dot, &scalar::axpy};
#if defined(RUDU_HAVE_AVX2)
constexpr KernelTable kAvx2{&avx2::dot, &avx2::axpy};
#endif
#if defined(RUDU_HAVE_NEON)
constexpr KernelTable kNeon{&neon::dot, &neon::axpy};
#endif

Isa detect() {
  if (const char* forced = std::getenv("RUDU_SIMD")) {
    const std::string name(forced);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (name == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(RUDU_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(RUDU_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  require(isa_available(isa), "SIMD variant not available: " + std::string(isa_name(isa)));
  switch (isa) {
#if defined(RUDU_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(RUDU_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active_kernels() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    const Isa isa = detect();
    g_isa.store(isa);
    table = &kernels_for(isa);
    g_active.store(table, std::memory_order_release);
  }
  return *table;
}

Isa active_isa() {
  active_kernels();
  return g_isa.load();
}

void set_active_isa(Isa isa) {
  const KernelTable* table = &kernels_for(isa);
  g_isa.store(isa);
  g_active.store(table, std::memory_order_release);
}

}  // namespace rudu::simd
