#pragma once

#include <cstddef>
#include <string>

// Dense inner-loop kernels. Every kernel has a scalar reference
// implementation and, on x86-64 hardware that supports it, an AVX2+FMA
// variant. The active variant is picked once at startup; set the
// environment variable GNM_KERNELS=scalar|avx2 to override.
//
// SIMD variants reassociate reductions, so results may differ from the
// scalar lane by a few ulps. Equivalence between lanes is covered by
// tests/test_kernels.cpp.

namespace gnm::kern {

struct Ops {
  // sum_i x[i] * y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i x[i]^2
  double (*dot_self)(const double* x, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // z[i] = a * x[i] + b * y[i]
  void (*lincomb)(double a, const double* x, double b, const double* y,
                  double* z, std::size_t n);
  // y[i] = a * x[i]
  void (*scal)(double a, const double* x, double* y, std::size_t n);
  // y[i] = sign(x[i]) * max(|x[i]| - tau, 0)
  void (*soft_threshold)(const double* x, double tau, double* y,
                         std::size_t n);
  // y[i] = max(x[i], 0)
  void (*clamp_nonneg)(const double* x, double* y, std::size_t n);
  // sum_i w[i] * x[i]^2
  double (*weighted_dot_self)(const double* w, const double* x,
                              std::size_t n);
  const char* name;
};

const Ops& scalar_ops();
bool avx2_available();
const Ops& avx2_ops();  // valid only when avx2_available()

// Active lane (resolved once; honors GNM_KERNELS).
const Ops& active();
std::string active_name();

inline double dot(const double* x, const double* y, std::size_t n) {
  return active().dot(x, y, n);
}
inline double dot_self(const double* x, std::size_t n) {
  return active().dot_self(x, n);
}
inline void axpy(double a, const double* x, double* y, std::size_t n) {
  active().axpy(a, x, y, n);
}
inline void lincomb(double a, const double* x, double b, const double* y,
                    double* z, std::size_t n) {
  active().lincomb(a, x, b, y, z, n);
}
inline void scal(double a, const double* x, double* y, std::size_t n) {
  active().scal(a, x, y, n);
}
inline void soft_threshold(const double* x, double tau, double* y,
                           std::size_t n) {
  active().soft_threshold(x, tau, y, n);
}
inline void clamp_nonneg(const double* x, double* y, std::size_t n) {
  active().clamp_nonneg(x, y, n);
}
inline double weighted_dot_self(const double* w, const double* x,
                                std::size_t n) {
  return active().weighted_dot_self(w, x, n);
}

}  // namespace gnm::kern
