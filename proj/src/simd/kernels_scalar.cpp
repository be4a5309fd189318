#include "maxsurv/simd/kernels.hpp"

#include <limits>

namespace maxsurv::simd {
namespace {

double masked_sum_scalar(const double* key, const double* values, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (key[i] > 0.0) acc += values[i];
  }
  return acc;
}

double sum_scalar(const double* values, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += values[i];
  return acc;
}

double min_ratio_scalar(const double* num, const double* den, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (den[i] > 0.0) {
      const double r = num[i] / den[i];
      if (r < best) best = r;
    }
  }
  return best;
}

std::size_t advance_scalar(double* x, const double* rate, double dt, double snap, std::size_t n) {
  std::size_t emptied = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool was_positive = x[i] > 0.0;
    double v = x[i] - rate[i] * dt;
    if (v <= snap) v = 0.0;
    x[i] = v;
    if (was_positive && v == 0.0) ++emptied;
  }
  return emptied;
}

void divide_scalar(double* out, const double* num, const double* den, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / den[i];
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", masked_sum_scalar, sum_scalar, min_ratio_scalar,
                                 advance_scalar, divide_scalar};
  return table;
}

}  // namespace maxsurv::simd
