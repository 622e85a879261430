#include "gnm/kernels.hpp"

#include <cmath>

namespace gnm::kern {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double dot_self_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void lincomb_scalar(double a, const double* x, double b, const double* y,
                    double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scal_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i];
}

void soft_threshold_scalar(const double* x, double tau, double* y,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    double m = std::fabs(v) - tau;
    y[i] = m > 0.0 ? (v < 0.0 ? -m : m) : 0.0;
  }
}

void clamp_nonneg_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

double weighted_dot_self_scalar(const double* w, const double* x,
                                std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += w[i] * x[i] * x[i];
  return acc;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {dot_scalar,
                          dot_self_scalar,
                          axpy_scalar,
                          lincomb_scalar,
                          scal_scalar,
                          soft_threshold_scalar,
                          clamp_nonneg_scalar,
                          weighted_dot_self_scalar,
                          "scalar"};
  return ops;
}

}  // namespace gnm::kern
