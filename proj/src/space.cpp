#include "gnm/space.hpp"

#include <cmath>
#include <stdexcept>

#include "gnm/kernels.hpp"

namespace gnm {

double pairing(std::span<const double> s, std::span<const double> x) {
  if (s.size() != x.size())
    throw std::invalid_argument("pairing: dimension mismatch");
  return kern::dot(s.data(), x.data(), s.size());
}

bool all_finite(std::span<const double> x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

Metric Metric::identity(int n) {
  if (n < 1) throw std::invalid_argument("Metric: dimension must be >= 1");
  return Metric(Kind::Identity, n);
}

Metric Metric::diagonal(Vec d) {
  if (d.empty()) throw std::invalid_argument("Metric: empty diagonal");
  for (double v : d)
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("Metric: diagonal entries must be > 0");
  Metric m(Kind::Diagonal, static_cast<int>(d.size()));
  m.diag_inv_.resize(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m.diag_inv_[i] = 1.0 / d[i];
  m.diag_ = std::move(d);
  return m;
}

Metric Metric::dense(int n, Vec mat) {
  if (n < 1 || mat.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("Metric: bad dense size");
  double scale = 0.0;
  for (double v : mat) scale = std::max(scale, std::fabs(v));
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument("Metric: dense matrix not finite");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::fabs(mat[i * n + j] - mat[j * n + i]) > 1e-12 * scale)
        throw std::invalid_argument("Metric: dense matrix not symmetric");

  // In-place Cholesky; a non-positive pivot means the matrix is not PD.
  Vec chol = mat;
  for (int j = 0; j < n; ++j) {
    double d = chol[j * n + j];
    for (int k = 0; k < j; ++k) d -= chol[j * n + k] * chol[j * n + k];
    if (!(d > 0.0))
      throw std::invalid_argument("Metric: dense matrix not positive definite");
    double lj = std::sqrt(d);
    chol[j * n + j] = lj;
    for (int i = j + 1; i < n; ++i) {
      double v = chol[i * n + j];
      for (int k = 0; k < j; ++k) v -= chol[i * n + k] * chol[j * n + k];
      chol[i * n + j] = v / lj;
    }
    for (int k = j + 1; k < n; ++k) chol[j * n + k] = 0.0;
  }

  Metric m(Kind::Dense, n);
  m.mat_ = std::move(mat);
  m.chol_ = std::move(chol);
  return m;
}

void Metric::check_dim(std::size_t sz) const {
  if (sz != static_cast<std::size_t>(n_))
    throw std::invalid_argument("Metric: dimension mismatch");
}

double Metric::primal_norm(std::span<const double> x) const {
  check_dim(x.size());
  switch (kind_) {
    case Kind::Identity:
      return std::sqrt(kern::dot_self(x.data(), x.size()));
    case Kind::Diagonal:
      return std::sqrt(
          kern::weighted_dot_self(diag_.data(), x.data(), x.size()));
    case Kind::Dense: {
      Vec bx;
      raise(x, 1.0, bx);
      return std::sqrt(std::max(0.0, pairing(bx, x)));
    }
  }
  return 0.0;
}

double Metric::dual_norm(std::span<const double> s) const {
  check_dim(s.size());
  switch (kind_) {
    case Kind::Identity:
      return std::sqrt(kern::dot_self(s.data(), s.size()));
    case Kind::Diagonal:
      return std::sqrt(
          kern::weighted_dot_self(diag_inv_.data(), s.data(), s.size()));
    case Kind::Dense: {
      Vec y;
      solve(s, y);
      return std::sqrt(std::max(0.0, pairing(s, y)));
    }
  }
  return 0.0;
}

void Metric::raise(std::span<const double> x, double scale, Vec& out) const {
  check_dim(x.size());
  out.resize(x.size());
  switch (kind_) {
    case Kind::Identity:
      kern::scal(scale, x.data(), out.data(), x.size());
      break;
    case Kind::Diagonal:
      for (int i = 0; i < n_; ++i) out[i] = scale * diag_[i] * x[i];
      break;
    case Kind::Dense:
      for (int i = 0; i < n_; ++i)
        out[i] = scale * kern::dot(mat_.data() + i * n_, x.data(), n_);
      break;
  }
}

void Metric::solve(std::span<const double> rhs, Vec& out) const {
  // Forward/backward substitution with the cached factor.
  out.assign(rhs.begin(), rhs.end());
  for (int i = 0; i < n_; ++i) {
    double v = out[i] - kern::dot(chol_.data() + i * n_, out.data(), i);
    out[i] = v / chol_[i * n_ + i];
  }
  for (int i = n_ - 1; i >= 0; --i) {
    double v = out[i];
    for (int k = i + 1; k < n_; ++k) v -= chol_[k * n_ + i] * out[k];
    out[i] = v / chol_[i * n_ + i];
  }
}

void Metric::lower(std::span<const double> s, Vec& out) const {
  check_dim(s.size());
  switch (kind_) {
    case Kind::Identity:
      out.assign(s.begin(), s.end());
      break;
    case Kind::Diagonal:
      out.resize(s.size());
      for (int i = 0; i < n_; ++i) out[i] = diag_inv_[i] * s[i];
      break;
    case Kind::Dense:
      solve(s, out);
      break;
  }
}

void Metric::add_lowered(double alpha, std::span<const double> s,
                         Vec& x) const {
  check_dim(s.size());
  check_dim(x.size());
  switch (kind_) {
    case Kind::Identity:
      kern::axpy(alpha, s.data(), x.data(), x.size());
      break;
    case Kind::Diagonal:
      for (int i = 0; i < n_; ++i) x[i] += alpha * diag_inv_[i] * s[i];
      break;
    case Kind::Dense: {
      Vec y;
      solve(s, y);
      kern::axpy(alpha, y.data(), x.data(), x.size());
      break;
    }
  }
}

double Metric::dual_inner(std::span<const double> s,
                          std::span<const double> t) const {
  check_dim(s.size());
  check_dim(t.size());
  switch (kind_) {
    case Kind::Identity:
      return kern::dot(s.data(), t.data(), s.size());
    case Kind::Diagonal: {
      double acc = 0.0;
      for (int i = 0; i < n_; ++i) acc += s[i] * diag_inv_[i] * t[i];
      return acc;
    }
    case Kind::Dense: {
      Vec y;
      solve(t, y);
      return pairing(s, y);
    }
  }
  return 0.0;
}

}  // namespace gnm
