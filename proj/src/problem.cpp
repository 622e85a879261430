#include "gnm/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "gnm/kernels.hpp"

namespace gnm {

std::optional<double> CompositeProblem::value(
    std::span<const double> x) const {
  auto r = reg_value(x);
  if (!r) return std::nullopt;
  return smooth_value(x) + *r;
}

Vec prox_step(const CompositeProblem& p, double L_hat,
              std::span<const double> x) {
  if (!(L_hat > 0.0)) throw std::invalid_argument("prox_step: L must be > 0");
  if (x.size() != static_cast<std::size_t>(p.dim()))
    throw std::invalid_argument("prox_step: dimension mismatch");
  Vec g;
  p.smooth_grad(x, g);
  if (!all_finite(g))
    throw std::runtime_error("prox_step: non-finite gradient");
  Vec z(x.begin(), x.end());
  p.metric().add_lowered(-1.0 / L_hat, g, z);
  if (!p.has_regularizer()) return z;
  Vec out;
  p.prox(1.0 / L_hat, z, out);
  return out;
}

Vec gradient_mapping(const CompositeProblem& p, double L_hat,
                     std::span<const double> x) {
  Vec t = prox_step(p, L_hat, x);
  Vec diff(x.size());
  kern::lincomb(1.0, x.data(), -1.0, t.data(), diff.data(), x.size());
  Vec g;
  p.metric().raise(diff, L_hat, g);
  return g;
}

DescentCheck descent_holds(const CompositeProblem& p, double L_hat,
                           std::span<const double> y) {
  Vec grad_y;
  double fy = p.smooth_value_grad(y, grad_y);
  Vec x = prox_step(p, L_hat, y);
  Vec d(y.size());
  kern::lincomb(1.0, x.data(), -1.0, y.data(), d.data(), y.size());
  double nd = p.metric().primal_norm(d);
  double rhs = fy + pairing(grad_y, d) + 0.5 * L_hat * nd * nd;
  double lhs = p.smooth_value(x);
  return {lhs <= rhs, lhs, rhs};
}

double descent_margin(const CompositeProblem& p, double L_hat,
                      std::span<const double> y, double fy,
                      std::span<const double> grad_y,
                      std::span<const double> x) {
  Vec d(y.size());
  kern::lincomb(1.0, x.data(), -1.0, y.data(), d.data(), y.size());
  double nd = p.metric().primal_norm(d);
  if (auto c = p.curvature_along(d))
    return 0.5 * (L_hat * nd * nd - *c);
  double rhs = fy + pairing(grad_y, d) + 0.5 * L_hat * nd * nd;
  return rhs - p.smooth_value(x);
}

std::optional<double> distance_to_optimum(const CompositeProblem& p,
                                          std::span<const double> x) {
  if (!p.x_star) return std::nullopt;
  Vec d(x.size());
  kern::lincomb(1.0, x.data(), -1.0, p.x_star->data(), d.data(), x.size());
  return p.metric().primal_norm(d);
}

}  // namespace gnm
