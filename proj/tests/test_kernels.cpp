#include <cstring>
#include <vector>

#include "doctest.h"
#include "tplab/kernels.hpp"
#include "tplab/rng.hpp"

using namespace tplab;

namespace {
bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}
}  // namespace

TEST_CASE("vector kernels agree bitwise with the scalar reference") {
  for (kernels::Isa isa : {kernels::Isa::avx2, kernels::Isa::neon}) {
    if (!kernels::isa_supported(isa)) continue;
    CAPTURE(kernels::isa_name(isa));
    CounterRng rng(3, 0);
    for (std::size_t len : {1u, 3u, 4u, 5u, 17u, 64u, 101u}) {
      std::vector<double> a(len), b(len), c(len), o1(len), o2(len);
      for (std::size_t i = 0; i < len; ++i) {
        a[i] = rng.uniform(-10, 10);
        b[i] = i % 5 == 0 ? 0.0 : rng.uniform(-10, 10);
        c[i] = i % 7 == 0 ? a[i] : rng.uniform(-10, 10);
      }
      kernels::pucci2_scalar(a.data(), b.data(), c.data(), o1.data(), len, 2.0, 0.5);
      REQUIRE(kernels::force_isa(isa));
      kernels::pucci2(a.data(), b.data(), c.data(), o2.data(), len, 2.0, 0.5);
      CHECK(same_bits(o1, o2));

      std::vector<double> u(len + 2), f(len), r1(len), r2(len);
      for (auto& x : u) x = rng.uniform(-1, 1);
      for (auto& x : f) x = rng.uniform(-1, 1);
      kernels::row1_scalar(u.data() + 1, f.data(), r1.data(), len, 256.0, 1e-3, 2.0, 0.5);
      kernels::row1(u.data() + 1, f.data(), r2.data(), len, 256.0, 1e-3, 2.0, 0.5);
      CHECK(same_bits(r1, r2));
      kernels::reset_isa();
    }
  }
}

TEST_CASE("scalar kernel on known matrices") {
  double a11[] = {1.0, -2.0, 3.0}, a12[] = {0.0, 0.0, 4.0}, a22[] = {-1.0, -3.0, 3.0}, out[3];
  kernels::pucci2_scalar(a11, a12, a22, out, 3, 2.0, 0.5);
  CHECK(out[0] == doctest::Approx(2.0 - 0.5));
  CHECK(out[1] == doctest::Approx(-2.5));
  CHECK(out[2] == doctest::Approx(2.0 * 7.0 - 0.5 * 1.0));
  CHECK(kernels::force_isa(kernels::Isa::scalar));
  CHECK(kernels::active_isa() == kernels::Isa::scalar);
  kernels::reset_isa();
}
