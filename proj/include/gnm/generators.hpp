#pragma once

#include <cstdint>
#include <functional>

#include "gnm/problem.hpp"

namespace gnm {

struct DenseMatrix {
  int rows = 0, cols = 0;
  Vec a;  // row-major, rows*cols

  void matvec(std::span<const double> x, Vec& y) const;    // y = A x
  void matvec_t(std::span<const double> x, Vec& y) const;  // y = A' x
};

struct CsrMatrix {
  int rows = 0, cols = 0;
  std::vector<std::int64_t> row_ptr;  // rows+1
  std::vector<int> col;
  Vec val;

  std::int64_t nnz() const { return static_cast<std::int64_t>(val.size()); }
  void matvec(std::span<const double> x, Vec& y) const;
  void matvec_t(std::span<const double> x, Vec& y) const;
  DenseMatrix to_dense() const;
};

// Largest eigenvalue of a symmetric PSD operator by power iteration with
// the deterministic all-ones start vector.
double power_iteration_sym(const std::function<void(std::span<const double>, Vec&)>& apply,
                           int n, double rel_tol = 1e-10, int max_iter = 100000);

// min 1/2 |Ax - b|^2 + lambda1 |x|_1, dense Gaussian A.
struct LassoInstance {
  int m = 0, n = 0;
  double lambda1 = 0.0;
  std::uint64_t seed = 0;
  DenseMatrix A;
  Vec b;
  Vec start;       // Gaussian starting point drawn with the instance
  double L = 0.0;  // lambda_max(A'A)

  ProblemPtr make_problem() const;
};
LassoInstance make_lasso(int m, int n, double lambda1, std::uint64_t seed);

// min 1/2 |Ax - b|^2 over x >= 0, sparse Gaussian A, b = A x0 + e with a
// sparse planted x0. Solvers start at the planted point.
struct NnlsInstance {
  int m = 0, n = 0;
  double density = 0.0;
  std::uint64_t seed = 0;
  CsrMatrix A;
  Vec b;
  Vec x0;     // planted point, 10% of entries equal to 4
  Vec noise;  // e
  double L = 0.0;

  ProblemPtr make_problem() const;
};
NnlsInstance make_nnls(int m, int n, double density, std::uint64_t seed);

// f(x) = 1/2 x'Hx + q'x with an exactly known spectrum [mu, L] and
// minimizer; the synthetic smooth test objective.
struct QuadraticInstance {
  int n = 0;
  double mu = 0.0, L = 0.0;
  std::uint64_t seed = 0;
  Vec H;  // n*n row-major symmetric
  Vec q;
  Vec x_star;
  double f_star = 0.0;
  Vec start;

  ProblemPtr make_problem() const;
};
QuadraticInstance make_quadratic(int n, double mu, double L,
                                 std::uint64_t seed);

// Problem objects over caller-supplied matrices; used by the loaders.
ProblemPtr make_lasso_problem(DenseMatrix A, Vec b, double lambda1,
                              std::optional<double> L);
ProblemPtr make_nnls_problem(CsrMatrix A, Vec b, std::optional<double> L);
ProblemPtr make_quadratic_problem(int n, Vec H, Vec q, std::optional<Vec> xs,
                                  std::optional<double> L,
                                  std::optional<double> mu);

}  // namespace gnm
