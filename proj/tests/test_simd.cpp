#include <random>
#include <vector>

#include "doctest.h"
#include "rudu/simd/kernels.hpp"

using namespace rudu::simd;

TEST_CASE("vector kernels match the scalar reference") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) continue;
    const auto& k = kernels_for(isa);
    INFO(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 15u, 16u, 33u, 250u, 1031u}) {
      std::vector<double> a(n), b(n), y1(n), y2(n);
      for (auto& v : a) v = u(rng);
      for (auto& v : b) v = u(rng);
      for (std::size_t i = 0; i < n; ++i) y1[i] = y2[i] = u(rng);
      const double ref = scalar::dot(a.data(), b.data(), n);
      CHECK(k.dot(a.data(), b.data(), n) == doctest::Approx(ref).epsilon(1e-12));
      scalar::axpy(0.37, a.data(), y1.data(), n);
      k.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y2[i] == doctest::Approx(y1[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("isa selection") {
  CHECK(isa_available(Isa::scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  set_active_isa(before);
}
