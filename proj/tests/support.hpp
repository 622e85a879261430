#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "gnm/problem.hpp"
#include "gnm/rng.hpp"

namespace gnm::test {

// Lambda-driven problem for hand-checkable toys.
class InlineProblem final : public CompositeProblem {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, Vec&)>;
  using RegFn = std::function<std::optional<double>(std::span<const double>)>;
  using ProxFn = std::function<void(double, std::span<const double>, Vec&)>;
  using CurvFn = std::function<double(std::span<const double>)>;

  InlineProblem(int n, ValueFn f, GradFn g)
      : n_(n), metric_(Metric::identity(n)), f_(std::move(f)), g_(std::move(g)) {}

  InlineProblem(int n, Metric metric, ValueFn f, GradFn g)
      : n_(n), metric_(std::move(metric)), f_(std::move(f)), g_(std::move(g)) {}

  void set_regularizer(RegFn r, ProxFn p) {
    reg_ = std::move(r);
    prox_ = std::move(p);
  }
  void set_curvature(CurvFn c) { curv_ = std::move(c); }

  int dim() const override { return n_; }
  const Metric& metric() const override { return metric_; }
  double smooth_value(std::span<const double> x) const override { return f_(x); }
  void smooth_grad(std::span<const double> x, Vec& g) const override { g_(x, g); }
  std::optional<double> reg_value(std::span<const double> x) const override {
    return reg_ ? reg_(x) : std::optional<double>(0.0);
  }
  void prox(double tau, std::span<const double> x, Vec& out) const override {
    if (prox_)
      prox_(tau, x, out);
    else
      out.assign(x.begin(), x.end());
  }
  bool has_regularizer() const override { return static_cast<bool>(reg_); }
  std::optional<double> curvature_along(
      std::span<const double> d) const override {
    if (curv_) return curv_(d);
    return std::nullopt;
  }

 private:
  int n_;
  Metric metric_;
  ValueFn f_;
  GradFn g_;
  RegFn reg_;
  ProxFn prox_;
  CurvFn curv_;
};

// 1D quadratic c/2 (x - m)^2.
inline InlineProblem quad1d(double c = 1.0, double m = 0.0) {
  InlineProblem p(
      1,
      [c, m](std::span<const double> x) {
        return 0.5 * c * (x[0] - m) * (x[0] - m);
      },
      [c, m](std::span<const double> x, Vec& g) {
        g.assign(1, c * (x[0] - m));
      });
  p.set_curvature([c](std::span<const double> d) { return c * d[0] * d[0]; });
  return p;
}

// Central finite difference gradient at x.
inline Vec fd_gradient(const CompositeProblem& p, const Vec& x,
                       double h = 1e-6) {
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (p.smooth_value(xp) - p.smooth_value(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

inline Vec random_vec(Rng& rng, int n, double scale = 1.0) {
  Vec v(n);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

inline double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max({1.0, std::fabs(a), std::fabs(b)});
}

// a <= b up to rounding noise scaled by the magnitude of the operands.
inline bool leq(double a, double b, double tol = 1e-12) {
  return a <= b + tol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline double max_rel_gap(const Vec& a, const Vec& b) {
  double worst = 0.0;
  double scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
  return worst;
}

}  // namespace gnm::test
