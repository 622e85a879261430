#pragma once

#include <span>
#include <vector>

namespace gnm {

using Vec = std::vector<double>;

// SPD metric that fixes the geometry of the primal space E and its dual.
// Primal points (iterates) and dual vectors (gradients, gradient mappings,
// accumulators) share the coordinate representation; the metric supplies
// the pairing between them:
//
//   primal norm  |x|   = sqrt(<Bx, x>)
//   dual norm    |s|_* = sqrt(<s, B^{-1}s>)
//   raising      s = B x   (primal -> dual)
//   lowering     x = B^{-1} s  (dual -> primal)
//
// Dense metrics are factorized once at construction (Cholesky) and the
// factor is reused for every B^{-1} application. Metrics are immutable.
class Metric {
 public:
  enum class Kind { Identity, Diagonal, Dense };

  static Metric identity(int n);
  // d: strictly positive diagonal entries.
  static Metric diagonal(Vec d);
  // m: n*n row-major, symmetric to 1e-12 relative and positive definite;
  // throws std::invalid_argument otherwise.
  static Metric dense(int n, Vec m);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }

  double primal_norm(std::span<const double> x) const;
  double dual_norm(std::span<const double> s) const;

  // out = scale * B * x
  void raise(std::span<const double> x, double scale, Vec& out) const;
  // out = B^{-1} s
  void lower(std::span<const double> s, Vec& out) const;
  // x += alpha * B^{-1} s  (the workhorse of every iterate update)
  void add_lowered(double alpha, std::span<const double> s, Vec& x) const;

  // <s, B^{-1} t>, the dual-space inner product.
  double dual_inner(std::span<const double> s, std::span<const double> t) const;

 private:
  Metric(Kind k, int n) : kind_(k), n_(n) {}
  void check_dim(std::size_t sz) const;
  void solve(std::span<const double> rhs, Vec& out) const;

  Kind kind_;
  int n_;
  Vec diag_;      // Diagonal
  Vec diag_inv_;  // Diagonal
  Vec mat_;       // Dense, row-major
  Vec chol_;      // Dense, lower-triangular Cholesky factor of mat_
};

// Plain Euclidean pairing <s, x> between a dual vector and a primal point.
double pairing(std::span<const double> s, std::span<const double> x);

bool all_finite(std::span<const double> x);

}  // namespace gnm
