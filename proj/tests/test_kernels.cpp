#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "maxsurv/simd/kernels.hpp"

using namespace maxsurv::simd;

namespace {

struct Arrays {
  std::vector<double> x, rate, power;
};

// Mix of zeros, dust below the snap threshold, and ordinary values.
Arrays random_arrays(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Arrays a;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = u(rng);
    a.x.push_back(r < 0.15 ? 0.0 : r < 0.2 ? 1e-13 : 10.0 * u(rng));
    a.rate.push_back(u(rng) < 0.3 ? 0.0 : u(rng));
    a.power.push_back(0.01 + 1.5 * u(rng));
  }
  return a;
}

double abs_sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += std::abs(e);
  return s;
}

void check_equivalent(const KernelTable& wide) {
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(1234);
  for (std::size_t n = 0; n < 70; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const Arrays a = random_arrays(rng, n);

      const double s_ref = ref.masked_sum(a.x.data(), a.power.data(), n);
      const double s_wide = wide.masked_sum(a.x.data(), a.power.data(), n);
      CHECK(std::abs(s_ref - s_wide) <= 1e-14 * abs_sum(a.power));

      CHECK(std::abs(ref.sum(a.power.data(), n) - wide.sum(a.power.data(), n)) <=
            1e-14 * abs_sum(a.power));

      CHECK(ref.min_ratio(a.x.data(), a.rate.data(), n) ==
            wide.min_ratio(a.x.data(), a.rate.data(), n));

      std::vector<double> q_ref(n), q_wide(n);
      ref.divide(q_ref.data(), a.rate.data(), a.power.data(), n);
      wide.divide(q_wide.data(), a.rate.data(), a.power.data(), n);
      CHECK(q_ref == q_wide);

      const double dt = std::uniform_real_distribution<double>(0.0, 3.0)(rng);
      std::vector<double> x_ref = a.x, x_wide = a.x;
      const auto e_ref = ref.advance(x_ref.data(), a.rate.data(), dt, 1e-12, n);
      const auto e_wide = wide.advance(x_wide.data(), a.rate.data(), dt, 1e-12, n);
      CHECK(e_ref == e_wide);
      CHECK(x_ref == x_wide);
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels") {
  const KernelTable& k = scalar_kernels();
  const std::vector<double> x{2.0, 0.0, 1.0};
  const std::vector<double> p{1.0, 3.0, 0.5};
  CHECK(k.masked_sum(x.data(), p.data(), 3) == 1.5);
  CHECK(k.sum(p.data(), 3) == 4.5);

  const std::vector<double> rate{0.5, 0.0, 2.0};
  CHECK(k.min_ratio(x.data(), rate.data(), 3) == 0.5);
  const std::vector<double> idle{0.0, 0.0, 0.0};
  CHECK(k.min_ratio(x.data(), idle.data(), 3) == std::numeric_limits<double>::infinity());

  std::vector<double> y = x;
  CHECK(k.advance(y.data(), rate.data(), 0.5, 1e-12, 3) == 1);
  CHECK(y == std::vector<double>{1.75, 0.0, 0.0});
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* wide = avx2_kernels();
  if (wide == nullptr) {
    MESSAGE("AVX2 variant not available on this build/CPU; skipping");
    return;
  }
  CHECK(wide->name == "avx2");
  check_equivalent(*wide);
}

TEST_CASE("active kernel table honours MAXSURV_SIMD") {
  const char* env = std::getenv("MAXSURV_SIMD");
  if (env != nullptr && std::string_view(env) == "scalar") {
    CHECK(active_kernels().name == "scalar");
  } else if (avx2_kernels() != nullptr) {
    CHECK(active_kernels().name == "avx2");
  } else {
    CHECK(active_kernels().name == "scalar");
  }
}
