// AVX2+FMA kernel lane. Compiled with -mavx2 -mfma; only dispatched to
// when the CPU reports support (see kernels.cpp).

#include "gnm/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace gnm::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swap = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double dot_self_avx2(const double* x, std::size_t n) {
  return dot_avx2(x, x, n);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

void lincomb_avx2(double a, const double* x, double b, const double* y,
                  double* z, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d t = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    t = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), t);
    _mm256_storeu_pd(z + i, t);
  }
  for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scal_avx2(double a, const double* x, double* y, std::size_t n) {
  __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) y[i] = a * x[i];
}

void soft_threshold_avx2(const double* x, double tau, double* y,
                         std::size_t n) {
  const __m256d vtau = _mm256_set1_pd(tau);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(x + i);
    __m256d mag = _mm256_sub_pd(_mm256_andnot_pd(sign_mask, v), vtau);
    mag = _mm256_max_pd(mag, zero);
    __m256d sign = _mm256_and_pd(sign_mask, v);
    _mm256_storeu_pd(y + i, _mm256_or_pd(mag, sign));
  }
  const Ops& s = scalar_ops();
  if (i < n) s.soft_threshold(x + i, tau, y + i, n - i);
}

void clamp_nonneg_avx2(const double* x, double* y, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
  for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

double weighted_dot_self_avx2(const double* w, const double* x,
                              std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vx = _mm256_loadu_pd(x + i);
    __m256d wx = _mm256_mul_pd(_mm256_loadu_pd(w + i), vx);
    acc = _mm256_fmadd_pd(wx, vx, acc);
  }
  double r = hsum(acc);
  for (; i < n; ++i) r += w[i] * x[i] * x[i];
  return r;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {dot_avx2,
                          dot_self_avx2,
                          axpy_avx2,
                          lincomb_avx2,
                          scal_avx2,
                          soft_threshold_avx2,
                          clamp_nonneg_avx2,
                          weighted_dot_self_avx2,
                          "avx2"};
  return ops;
}

}  // namespace gnm::kern

#else

namespace gnm::kern {
const Ops& avx2_ops() { return scalar_ops(); }
}  // namespace gnm::kern

#endif
