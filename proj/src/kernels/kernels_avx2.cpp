#include <cmath>

#include "randcomp/kernels.hpp"

#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
#include <immintrin.h>
#define RANDCOMP_HAVE_AVX2_KERNELS 1
#endif

namespace randcomp::kernels::avx2 {

#ifdef RANDCOMP_HAVE_AVX2_KERNELS

namespace {

constexpr std::size_t kLanes = 4;

__attribute__((target("avx2"))) inline double horizontal_add(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

// Multiply and add stay separate so results match the scalar path bit for bit.
__attribute__((target("avx2"))) void axpy(double alpha, const double* x, double* y,
                                          std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2"))) void scaled_copy(double alpha, const double* x, double* y,
                                                 std::size_t n) noexcept {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = alpha * x[i];
}

__attribute__((target("avx2"))) double max_abs_diff(const double* a, const double* b,
                                                    std::size_t n) noexcept {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d best = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    best = _mm256_max_pd(best, _mm256_andnot_pd(sign_mask, diff));
  }
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, best);
  double result = 0.0;
  for (double v : lanes) {
    if (v > result) result = v;
  }
  for (; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > result) result = d;
  }
  return result;
}

__attribute__((target("avx2"))) double dot(const double* a, const double* b,
                                           std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double result = horizontal_add(acc);
  for (; i < n; ++i) result += a[i] * b[i];
  return result;
}

__attribute__((target("avx2"))) double sum(const double* a, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double result = horizontal_add(acc);
  for (; i < n; ++i) result += a[i];
  return result;
}

#else

// Non-x86 builds: the dispatcher never selects these.
void axpy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  scalar::axpy(alpha, x, y, n);
}
void scaled_copy(double alpha, const double* x, double* y, std::size_t n) noexcept {
  scalar::scaled_copy(alpha, x, y, n);
}
double max_abs_diff(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::max_abs_diff(a, b, n);
}
double dot(const double* a, const double* b, std::size_t n) noexcept {
  return scalar::dot(a, b, n);
}
double sum(const double* a, std::size_t n) noexcept { return scalar::sum(a, n); }

#endif

}  // namespace randcomp::kernels::avx2
