// Compiled with -mavx2 only; the dispatcher checks the CPU before handing this
// table out.

#include "maxsurv/simd/kernels.hpp"

#include <immintrin.h>

#include <limits>

namespace maxsurv::simd {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_min_sd(m, _mm_unpackhi_pd(m, m)));
}

double masked_sum_avx2(const double* key, const double* values, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d acc = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d k = _mm256_loadu_pd(key + i);
    const __m256d v = _mm256_loadu_pd(values + i);
    const __m256d mask = _mm256_cmp_pd(k, zero, _CMP_GT_OQ);
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, v));
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    if (key[i] > 0.0) total += values[i];
  }
  return total;
}

double sum_avx2(const double* values, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(values + i));
  double total = hsum(acc);
  for (; i < n; ++i) total += values[i];
  return total;
}

double min_ratio_avx2(const double* num, const double* den, std::size_t n) {
  const double inf = std::numeric_limits<double>::infinity();
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vinf = _mm256_set1_pd(inf);
  __m256d best = vinf;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_loadu_pd(den + i);
    const __m256d mask = _mm256_cmp_pd(d, zero, _CMP_GT_OQ);
    // Lanes with den <= 0 divide by one and are then replaced by +inf.
    const __m256d safe = _mm256_blendv_pd(_mm256_set1_pd(1.0), d, mask);
    const __m256d r = _mm256_div_pd(_mm256_loadu_pd(num + i), safe);
    best = _mm256_min_pd(best, _mm256_blendv_pd(vinf, r, mask));
  }
  double out = hmin(best);
  for (; i < n; ++i) {
    if (den[i] > 0.0) {
      const double r = num[i] / den[i];
      if (r < out) out = r;
    }
  }
  return out;
}

std::size_t advance_avx2(double* x, const double* rate, double dt, double snap, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d vdt = _mm256_set1_pd(dt);
  const __m256d vsnap = _mm256_set1_pd(snap);
  std::size_t emptied = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d old = _mm256_loadu_pd(x + i);
    const __m256d was_positive = _mm256_cmp_pd(old, zero, _CMP_GT_OQ);
    __m256d v = _mm256_sub_pd(old, _mm256_mul_pd(_mm256_loadu_pd(rate + i), vdt));
    const __m256d keep = _mm256_cmp_pd(v, vsnap, _CMP_GT_OQ);
    v = _mm256_and_pd(keep, v);
    _mm256_storeu_pd(x + i, v);
    const int emptied_mask = _mm256_movemask_pd(_mm256_andnot_pd(keep, was_positive));
    emptied += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(emptied_mask)));
  }
  for (; i < n; ++i) {
    const bool was_positive = x[i] > 0.0;
    double v = x[i] - rate[i] * dt;
    if (v <= snap) v = 0.0;
    x[i] = v;
    if (was_positive && v == 0.0) ++emptied;
  }
  return emptied;
}

void divide_avx2(double* out, const double* num, const double* den, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_loadu_pd(num + i), _mm256_loadu_pd(den + i)));
  }
  for (; i < n; ++i) out[i] = num[i] / den[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2", masked_sum_avx2, sum_avx2, min_ratio_avx2, advance_avx2,
                                 divide_avx2};
  return table;
}

}  // namespace maxsurv::simd
