#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>

#include "gnm/space.hpp"

namespace gnm {

// Composite objective F = f + Psi with a smooth convex f and a proper
// closed convex regularizer Psi whose prox is exact. Oracles are pure and
// instances are immutable after construction, so a problem can be shared
// read-only across threads.
class CompositeProblem {
 public:
  virtual ~CompositeProblem() = default;

  virtual int dim() const = 0;
  virtual const Metric& metric() const = 0;

  virtual double smooth_value(std::span<const double> x) const = 0;
  virtual void smooth_grad(std::span<const double> x, Vec& g) const = 0;
  // Combined oracle; override when value and gradient share work.
  virtual double smooth_value_grad(std::span<const double> x, Vec& g) const {
    smooth_grad(x, g);
    return smooth_value(x);
  }

  // Psi(x); nullopt encodes +infinity (x infeasible).
  virtual std::optional<double> reg_value(std::span<const double>) const {
    return 0.0;
  }
  // out = argmin_z { tau * Psi(z) + 1/2 |z - x|^2 }; identity when Psi == 0.
  virtual void prox(double, std::span<const double> x, Vec& out) const {
    out.assign(x.begin(), x.end());
  }
  virtual bool has_regularizer() const { return false; }

  // d' * f''(x) * d along a direction, exact for the quadratic smooth parts
  // used here. Engines prefer it for descent tests since the value-based
  // form cancels catastrophically near optimality. nullopt when the smooth
  // part does not expose curvature.
  virtual std::optional<double> curvature_along(std::span<const double>) const {
    return std::nullopt;
  }

  // F(x) = f(x) + Psi(x); nullopt when x is infeasible.
  std::optional<double> value(std::span<const double> x) const;

  std::optional<double> lipschitz;  // known L > 0
  std::optional<double> growth;     // known quadratic growth mu >= 0
  std::optional<Vec> x_star;        // known minimizer
  std::optional<double> f_star;     // F at the minimizer
  std::string name = "problem";
};

using ProblemPtr = std::shared_ptr<const CompositeProblem>;

// Proximal gradient step T_L(x): the minimizer of the quadratic upper model
// of f around x plus Psi; the plain gradient step when Psi == 0.
Vec prox_step(const CompositeProblem& p, double L_hat,
              std::span<const double> x);

// g_L(x) = L * B * (x - T_L(x)); equals f'(x) when Psi == 0 and vanishes
// exactly at minimizers of F.
Vec gradient_mapping(const CompositeProblem& p, double L_hat,
                     std::span<const double> x);

struct DescentCheck {
  bool holds;
  double lhs;  // f(T_L(y))
  double rhs;  // f(y) + <f'(y), T_L(y) - y> + L/2 |T_L(y) - y|^2
};

// The backtracking acceptance test certifying the estimate L_hat at y.
DescentCheck descent_holds(const CompositeProblem& p, double L_hat,
                           std::span<const double> y);

// rhs - lhs of the descent inequality, computed through curvature_along when
// available (no cancellation), otherwise from objective values. fy/grad_y
// are the already-evaluated smooth oracle outputs at y, x = T_L(y).
double descent_margin(const CompositeProblem& p, double L_hat,
                      std::span<const double> y, double fy,
                      std::span<const double> grad_y,
                      std::span<const double> x);

// |x - x*| when the instance records its optimum, nullopt otherwise.
std::optional<double> distance_to_optimum(const CompositeProblem& p,
                                          std::span<const double> x);

}  // namespace gnm
