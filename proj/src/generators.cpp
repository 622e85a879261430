#include "gnm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "gnm/kernels.hpp"
#include "gnm/rng.hpp"

namespace gnm {

void DenseMatrix::matvec(std::span<const double> x, Vec& y) const {
  y.resize(rows);
  for (int i = 0; i < rows; ++i)
    y[i] = kern::dot(a.data() + static_cast<std::size_t>(i) * cols, x.data(),
                     cols);
}

void DenseMatrix::matvec_t(std::span<const double> x, Vec& y) const {
  y.assign(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    kern::axpy(x[i], a.data() + static_cast<std::size_t>(i) * cols, y.data(),
               cols);
}

void CsrMatrix::matvec(std::span<const double> x, Vec& y) const {
  y.resize(rows);
  for (int i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      acc += val[k] * x[col[k]];
    y[i] = acc;
  }
}

void CsrMatrix::matvec_t(std::span<const double> x, Vec& y) const {
  y.assign(cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      y[col[k]] += val[k] * x[i];
}

DenseMatrix CsrMatrix::to_dense() const {
  DenseMatrix d;
  d.rows = rows;
  d.cols = cols;
  d.a.assign(static_cast<std::size_t>(rows) * cols, 0.0);
  for (int i = 0; i < rows; ++i)
    for (std::int64_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
      d.a[static_cast<std::size_t>(i) * cols + col[k]] = val[k];
  return d;
}

double power_iteration_sym(
    const std::function<void(std::span<const double>, Vec&)>& apply, int n,
    double rel_tol, int max_iter) {
  Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Vec w;
  double lambda = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    apply(v, w);
    double next = kern::dot(v.data(), w.data(), n);  // Rayleigh quotient
    double wn = std::sqrt(kern::dot_self(w.data(), n));
    if (wn == 0.0) return 0.0;
    kern::scal(1.0 / wn, w.data(), v.data(), n);
    if (it > 0 && std::fabs(next - lambda) <= rel_tol * std::fabs(next))
      return next;
    lambda = next;
  }
  return lambda;
}

namespace {

// Least-squares smooth part 1/2 |Ax - b|^2 shared by LASSO and NNLS.
template <typename Mat>
class LeastSquaresBase : public CompositeProblem {
 public:
  LeastSquaresBase(Mat A, Vec b)
      : A_(std::move(A)), b_(std::move(b)), metric_(Metric::identity(A_.cols)) {}

  int dim() const override { return A_.cols; }
  const Metric& metric() const override { return metric_; }

  double smooth_value(std::span<const double> x) const override {
    Vec r;
    A_.matvec(x, r);
    kern::axpy(-1.0, b_.data(), r.data(), r.size());
    return 0.5 * kern::dot_self(r.data(), r.size());
  }

  void smooth_grad(std::span<const double> x, Vec& g) const override {
    Vec r;
    A_.matvec(x, r);
    kern::axpy(-1.0, b_.data(), r.data(), r.size());
    A_.matvec_t(r, g);
  }

  double smooth_value_grad(std::span<const double> x, Vec& g) const override {
    Vec r;
    A_.matvec(x, r);
    kern::axpy(-1.0, b_.data(), r.data(), r.size());
    A_.matvec_t(r, g);
    return 0.5 * kern::dot_self(r.data(), r.size());
  }

  std::optional<double> curvature_along(
      std::span<const double> d) const override {
    Vec w;
    A_.matvec(d, w);
    return kern::dot_self(w.data(), w.size());
  }

  const Mat& matrix() const { return A_; }

 protected:
  Mat A_;
  Vec b_;
  Metric metric_;
};

class LassoProblem final : public LeastSquaresBase<DenseMatrix> {
 public:
  LassoProblem(DenseMatrix A, Vec b, double lambda1)
      : LeastSquaresBase(std::move(A), std::move(b)), lambda1_(lambda1) {}

  std::optional<double> reg_value(std::span<const double> x) const override {
    double s = 0.0;
    for (double v : x) s += std::fabs(v);
    return lambda1_ * s;
  }

  void prox(double tau, std::span<const double> x, Vec& out) const override {
    out.resize(x.size());
    kern::soft_threshold(x.data(), tau * lambda1_, out.data(), x.size());
  }

  bool has_regularizer() const override { return true; }

 private:
  double lambda1_;
};

class NnlsProblem final : public LeastSquaresBase<CsrMatrix> {
 public:
  NnlsProblem(CsrMatrix A, Vec b) : LeastSquaresBase(std::move(A), std::move(b)) {}

  std::optional<double> reg_value(std::span<const double> x) const override {
    for (double v : x)
      if (v < 0.0) return std::nullopt;
    return 0.0;
  }

  void prox(double, std::span<const double> x, Vec& out) const override {
    out.resize(x.size());
    kern::clamp_nonneg(x.data(), out.data(), x.size());
  }

  bool has_regularizer() const override { return true; }
};

class QuadraticProblem final : public CompositeProblem {
 public:
  QuadraticProblem(int n, Vec H, Vec q)
      : n_(n), H_(std::move(H)), q_(std::move(q)), metric_(Metric::identity(n)) {}

  QuadraticProblem(int n, Vec H, Vec q, Metric metric)
      : n_(n), H_(std::move(H)), q_(std::move(q)), metric_(std::move(metric)) {}

  int dim() const override { return n_; }
  const Metric& metric() const override { return metric_; }

  double smooth_value(std::span<const double> x) const override {
    Vec hx;
    apply_h(x, hx);
    return 0.5 * kern::dot(x.data(), hx.data(), n_) +
           kern::dot(q_.data(), x.data(), n_);
  }

  void smooth_grad(std::span<const double> x, Vec& g) const override {
    apply_h(x, g);
    kern::axpy(1.0, q_.data(), g.data(), n_);
  }

  std::optional<double> curvature_along(
      std::span<const double> d) const override {
    Vec hd;
    apply_h(d, hd);
    return kern::dot(d.data(), hd.data(), n_);
  }

 private:
  void apply_h(std::span<const double> x, Vec& y) const {
    y.resize(n_);
    for (int i = 0; i < n_; ++i)
      y[i] = kern::dot(H_.data() + static_cast<std::size_t>(i) * n_, x.data(),
                       n_);
  }

  int n_;
  Vec H_;
  Vec q_;
  Metric metric_;
};

Vec draw_normal(Rng& rng, std::size_t n, double stddev = 1.0) {
  Vec v(n);
  for (auto& x : v) x = rng.normal(0.0, stddev);
  return v;
}

// Floyd's algorithm: k distinct values from [0, total), deterministic for a
// given rng state. Returned sorted.
std::vector<std::int64_t> sample_distinct(Rng& rng, std::int64_t total,
                                          std::int64_t k) {
  std::unordered_set<std::int64_t> seen;
  seen.reserve(static_cast<std::size_t>(k) * 2);
  std::vector<std::int64_t> out;
  out.reserve(k);
  for (std::int64_t j = total - k; j < total; ++j) {
    std::int64_t t =
        static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (seen.count(t)) t = j;
    seen.insert(t);
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

LassoInstance make_lasso(int m, int n, double lambda1, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("make_lasso: bad sizes");
  if (!(lambda1 > 0.0))
    throw std::invalid_argument("make_lasso: lambda1 must be > 0");
  Rng rng(seed);
  LassoInstance inst;
  inst.m = m;
  inst.n = n;
  inst.lambda1 = lambda1;
  inst.seed = seed;
  inst.A.rows = m;
  inst.A.cols = n;
  inst.A.a = draw_normal(rng, static_cast<std::size_t>(m) * n);
  inst.b = draw_normal(rng, m, 3.0);  // variance 9
  inst.start = draw_normal(rng, n);
  const DenseMatrix& A = inst.A;
  inst.L = power_iteration_sym(
      [&A](std::span<const double> x, Vec& y) {
        Vec w;
        A.matvec(x, w);
        A.matvec_t(w, y);
      },
      n);
  return inst;
}

ProblemPtr make_lasso_problem(DenseMatrix A, Vec b, double lambda1,
                              std::optional<double> L) {
  auto p = std::make_shared<LassoProblem>(std::move(A), std::move(b), lambda1);
  p->lipschitz = L;
  p->name = "lasso";
  return p;
}

ProblemPtr LassoInstance::make_problem() const {
  return make_lasso_problem(A, b, lambda1, L);
}

NnlsInstance make_nnls(int m, int n, double density, std::uint64_t seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("make_nnls: bad sizes");
  if (!(density > 0.0) || density > 1.0)
    throw std::invalid_argument("make_nnls: density must be in (0, 1]");
  Rng rng(seed);
  NnlsInstance inst;
  inst.m = m;
  inst.n = n;
  inst.density = density;
  inst.seed = seed;

  const std::int64_t total = static_cast<std::int64_t>(m) * n;
  const std::int64_t nnz = std::llround(density * static_cast<double>(total));
  auto idx = sample_distinct(rng, total, nnz);

  CsrMatrix& A = inst.A;
  A.rows = m;
  A.cols = n;
  A.row_ptr.assign(m + 1, 0);
  A.col.resize(nnz);
  A.val.resize(nnz);
  for (std::int64_t k = 0; k < nnz; ++k) {
    int r = static_cast<int>(idx[k] / n);
    A.row_ptr[r + 1]++;
    A.col[k] = static_cast<int>(idx[k] % n);
    A.val[k] = rng.normal();
  }
  for (int i = 0; i < m; ++i) A.row_ptr[i + 1] += A.row_ptr[i];

  // Planted point: 10% of entries equal to 4 at uniform locations.
  inst.x0.assign(n, 0.0);
  std::int64_t k0 = std::llround(0.1 * n);
  for (std::int64_t j : sample_distinct(rng, n, k0)) inst.x0[j] = 4.0;

  inst.noise = draw_normal(rng, m);
  A.matvec(inst.x0, inst.b);
  kern::axpy(1.0, inst.noise.data(), inst.b.data(), m);

  inst.L = power_iteration_sym(
      [&A](std::span<const double> x, Vec& y) {
        Vec w;
        A.matvec(x, w);
        A.matvec_t(w, y);
      },
      n);
  return inst;
}

ProblemPtr make_nnls_problem(CsrMatrix A, Vec b, std::optional<double> L) {
  auto p = std::make_shared<NnlsProblem>(std::move(A), std::move(b));
  p->lipschitz = L;
  p->name = "nnls";
  return p;
}

ProblemPtr NnlsInstance::make_problem() const {
  return make_nnls_problem(A, b, L);
}

QuadraticInstance make_quadratic(int n, double mu, double L,
                                 std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("make_quadratic: bad size");
  if (!(L > 0.0) || mu < 0.0 || mu > L)
    throw std::invalid_argument("make_quadratic: need 0 <= mu <= L");
  Rng rng(seed);
  QuadraticInstance inst;
  inst.n = n;
  inst.mu = mu;
  inst.L = L;
  inst.seed = seed;

  // H = P diag(lambda) P' with P a product of three Householder
  // reflections; the spectrum is exact by construction.
  Vec lambda(n);
  for (int i = 0; i < n; ++i)
    lambda[i] = (n == 1) ? L : mu + (L - mu) * static_cast<double>(i) / (n - 1);

  Vec H(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) H[static_cast<std::size_t>(i) * n + i] = lambda[i];

  auto reflect = [&](const Vec& v) {
    // H <- (I - 2vv') H (I - 2vv') for a unit vector v.
    Vec hv(n);
    for (int i = 0; i < n; ++i)
      hv[i] = kern::dot(H.data() + static_cast<std::size_t>(i) * n, v.data(), n);
    double vhv = kern::dot(v.data(), hv.data(), n);
    // rank-2 update: H - 2 v hv' - 2 hv v' + 4 (v'Hv) v v'
    for (int i = 0; i < n; ++i) {
      double* row = H.data() + static_cast<std::size_t>(i) * n;
      double ci = -2.0 * v[i];
      kern::axpy(ci, hv.data(), row, n);
      kern::axpy(-2.0 * hv[i] + 4.0 * vhv * v[i], v.data(), row, n);
    }
  };
  for (int rep = 0; rep < 3; ++rep) {
    Vec v = draw_normal(rng, n);
    double nv = std::sqrt(kern::dot_self(v.data(), n));
    kern::scal(1.0 / nv, v.data(), v.data(), n);
    reflect(v);
  }
  // Restore exact symmetry lost to rounding.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = 0.5 * (H[static_cast<std::size_t>(i) * n + j] +
                        H[static_cast<std::size_t>(j) * n + i]);
      H[static_cast<std::size_t>(i) * n + j] = s;
      H[static_cast<std::size_t>(j) * n + i] = s;
    }

  inst.x_star = draw_normal(rng, n);
  inst.q.resize(n);
  for (int i = 0; i < n; ++i)
    inst.q[i] = -kern::dot(H.data() + static_cast<std::size_t>(i) * n,
                           inst.x_star.data(), n);
  double xhx = 0.0;
  for (int i = 0; i < n; ++i)
    xhx += inst.x_star[i] *
           kern::dot(H.data() + static_cast<std::size_t>(i) * n,
                     inst.x_star.data(), n);
  inst.f_star = -0.5 * xhx;
  inst.start = draw_normal(rng, n);
  inst.H = std::move(H);
  return inst;
}

ProblemPtr make_quadratic_problem(int n, Vec H, Vec q, std::optional<Vec> xs,
                                  std::optional<double> L,
                                  std::optional<double> mu) {
  auto p = std::make_shared<QuadraticProblem>(n, std::move(H), std::move(q));
  p->lipschitz = L;
  p->growth = mu;
  if (xs) {
    p->x_star = std::move(xs);
    p->f_star = p->smooth_value(*p->x_star);
  }
  p->name = "quadratic";
  return p;
}

ProblemPtr QuadraticInstance::make_problem() const {
  auto p = make_quadratic_problem(n, H, q, x_star, L, mu);
  return p;
}

}  // namespace gnm
