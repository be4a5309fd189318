#pragma once

// Per-device inner loops of the dispatch engine.
//
// Every kernel has a scalar reference implementation; wider variants are chosen
// once at startup from the host CPU features. Element-wise kernels and the
// minimum reduction are bit-identical across variants; the summations differ
// only by reassociation.

#include <cstddef>
#include <span>
#include <string_view>

namespace maxsurv::simd {

struct KernelTable {
  std::string_view name;

  // sum of values[i] over i with key[i] > 0
  double (*masked_sum)(const double* key, const double* values, std::size_t n);

  double (*sum)(const double* values, std::size_t n);

  // min of num[i] / den[i] over i with den[i] > 0; +inf when there is none
  double (*min_ratio)(const double* num, const double* den, std::size_t n);

  // x[i] -= rate[i] * dt, then x[i] = 0 where x[i] <= snap.
  // Returns how many entries that were positive before the call are now zero.
  std::size_t (*advance)(double* x, const double* rate, double dt, double snap, std::size_t n);

  // out[i] = num[i] / den[i]
  void (*divide)(double* out, const double* num, const double* den, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();

/// The table used by the library. Picks the widest supported variant unless the
/// MAXSURV_SIMD environment variable is set to "scalar".
const KernelTable& active_kernels();

inline double masked_sum(std::span<const double> key, std::span<const double> values) {
  return active_kernels().masked_sum(key.data(), values.data(), key.size());
}

inline double sum(std::span<const double> values) {
  return active_kernels().sum(values.data(), values.size());
}

inline double min_ratio(std::span<const double> num, std::span<const double> den) {
  return active_kernels().min_ratio(num.data(), den.data(), num.size());
}

inline std::size_t advance(std::span<double> x, std::span<const double> rate, double dt,
                           double snap) {
  return active_kernels().advance(x.data(), rate.data(), dt, snap, x.size());
}

inline void divide(std::span<double> out, std::span<const double> num,
                   std::span<const double> den) {
  active_kernels().divide(out.data(), num.data(), den.data(), out.size());
}

}  // namespace maxsurv::simd
