#include "gnm/schedules.hpp"

#include <cmath>
#include <stdexcept>

namespace gnm::schedules {

namespace {
void require_T(int T) {
  if (T < 2) throw std::invalid_argument("schedules: T must be >= 2");
}
}  // namespace

std::vector<double> theta_table(int T) {
  require_T(T);
  std::vector<double> th(T + 1);
  th[T] = 0.0;
  th[T - 1] = 1.0;
  for (int k = T - 2; k >= 1; --k)
    th[k] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * th[k + 1] * th[k + 1]));
  th[0] = 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * th[1] * th[1]));
  return th;
}

Schedule ogmg_schedule(int T, double L, double A_last) {
  require_T(T);
  if (!(L > 0.0) || !(A_last > 0.0))
    throw std::invalid_argument("ogmg_schedule: L and A_last must be > 0");
  auto th = theta_table(T);
  Schedule s;
  s.T = T;
  s.family = Family::OgmG;
  s.L_ref = L;
  s.A_last = A_last;
  s.a.assign(T + 1, 0.0);
  s.A.assign(T + 1, 0.0);
  s.b.assign(T + 1, 0.0);
  s.B.assign(T + 1, 0.0);

  s.A[0] = 2.0 * A_last / (th[0] * th[0]);
  for (int k = 1; k <= T - 1; ++k) s.A[k] = A_last / (th[k] * th[k]);
  for (int k = 1; k <= T - 1; ++k)
    s.a[k] = A_last / (th[k - 1] * th[k] * th[k]);
  for (int k = 1; k <= T - 1; ++k) {
    s.b[k] = th[k] * th[k] * (2.0 * th[k] - 1.0) / (L * A_last);
    s.B[k] = th[k] * th[k] * th[k] * th[k] / (L * A_last);
  }
  s.B[T] = 0.0;
  return s;
}

OcgmgWeights ocgmg_weights(int T, double A_last) {
  require_T(T);
  if (!(A_last > 0.0))
    throw std::invalid_argument("ocgmg_weights: A_last must be > 0");
  OcgmgWeights w;
  w.T = T;
  w.A_last = A_last;
  w.a.assign(T + 1, 0.0);
  w.A.assign(T + 1, 0.0);
  w.a[T] = A_last;
  w.A[T] = 2.0 * A_last;
  for (int k = T - 1; k >= 1; --k) {
    w.A[k] = w.A[k + 1] - w.a[k + 1];
    double ak1 = w.a[k + 1];
    w.a[k] = ak1 / w.A[k + 1] *
             (std::sqrt(ak1 * ak1 + w.A[k] * w.A[k + 1]) - ak1);
  }
  w.A[0] = w.A[1] - w.a[1];
  return w;
}

Schedule ocgmg_schedule(int T, double L0, double A_last) {
  if (!(L0 > 0.0))
    throw std::invalid_argument("ocgmg_schedule: L0 must be > 0");
  auto w = ocgmg_weights(T, A_last);
  Schedule s;
  s.T = T;
  s.family = Family::OcgmG;
  s.L_ref = L0;
  s.A_last = A_last;
  s.a = std::move(w.a);
  s.A = std::move(w.A);
  s.b.assign(T + 1, 0.0);
  s.B.assign(T + 1, 0.0);
  for (int k = 0; k <= T - 1; ++k) s.b[k] = 1.0 / (L0 * s.a[k + 1]);
  for (int k = 1; k <= T; ++k)
    s.B[k] = (s.A[k] - 2.0 * s.a[k]) / (2.0 * L0 * s.a[k] * s.a[k]);
  s.B[0] = s.B[1] + s.b[0];
  return s;
}

Schedule custom_schedule(int T, const std::vector<double>& a_in,
                         const std::vector<double>& b_in, double A0,
                         double L_ref) {
  require_T(T);
  if (a_in.size() != static_cast<std::size_t>(T - 1) ||
      b_in.size() != static_cast<std::size_t>(T - 1))
    throw std::invalid_argument("custom_schedule: need T-1 weights");
  if (!(A0 > 0.0)) throw std::invalid_argument("custom_schedule: A0 must be > 0");
  for (double v : a_in)
    if (!(v > 0.0)) throw std::invalid_argument("custom_schedule: a must be > 0");
  for (double v : b_in)
    if (!(v > 0.0)) throw std::invalid_argument("custom_schedule: b must be > 0");
  Schedule s;
  s.T = T;
  s.family = Family::Custom;
  s.L_ref = L_ref;
  s.A_last = 0.0;
  s.a.assign(T + 1, 0.0);
  s.A.assign(T + 1, 0.0);
  s.b.assign(T + 1, 0.0);
  s.B.assign(T + 1, 0.0);
  s.A[0] = A0;
  for (int k = 1; k <= T - 1; ++k) {
    s.a[k] = a_in[k - 1];
    s.A[k] = s.A[k - 1] + s.a[k];
    s.b[k] = b_in[k - 1];
  }
  s.B[T] = 0.0;
  for (int k = T - 1; k >= 1; --k) s.B[k] = s.B[k + 1] + s.b[k];
  s.A_last = s.A[T - 1];
  return s;
}

std::vector<double> t_sequence(int T, TFamily family) {
  require_T(T);
  std::vector<double> t(T + 1, 0.0);
  if (family == TFamily::OcgmG) {
    t[T] = 2.0;
    for (int k = T - 1; k >= 0; --k)
      t[k] = 1.0 + std::sqrt(t[k + 1] * (t[k + 1] - 1.0) + 1.0);
  } else {
    t[0] = 0.0;
    for (int k = 0; k <= T - 1; ++k)
      t[k + 1] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t[k] * t[k]));
  }
  return t;
}

std::vector<double> fistag_accumulators(int T, double L) {
  require_T(T);
  if (!(L > 0.0))
    throw std::invalid_argument("fistag_accumulators: L must be > 0");
  std::vector<double> B(T + 1, 0.0);
  B[T] = 0.0;
  B[T - 1] = 1.0 / L;  // A_{T-1} b_{T-1} = 1/L with A_{T-1} = 1
  for (int k = T - 1; k >= 1; --k) {
    double bk = B[k], bk1 = B[k + 1];
    double num = 2.0 * bk * bk - bk * bk1 + bk1 * bk1 +
                 (bk - bk1) * std::sqrt(3.0 * bk * bk + bk1 * bk1);
    B[k - 1] = num / (bk + bk1);
  }
  return B;
}

RateConstants rate_constants(int l) {
  if (l < 1) throw std::invalid_argument("rate_constants: l must be >= 1");
  // tau[i] = t_{T-i}; the reverse recursion depends only on the distance
  // from T. long double keeps the T-shift constant accurate for l = 1e5.
  long double tau = 2.0L;  // t_T
  long double ratio = 1.0L;  // A_{T-l+1} / A_{T-1} for the current l
  // A_{i-1}/A_i = (t_i - 1)/t_i; accumulate (t_{T-j} - 1)/t_{T-j} for
  // j = 1 .. l-2 to move from A_{T-1} down to A_{T-l+1}.
  long double prev = tau;
  for (int i = 1; i <= l; ++i) {
    tau = 1.0L + sqrtl(prev * (prev - 1.0L) + 1.0L);
    if (i >= 1 && i <= l - 2) ratio *= (tau - 1.0L) / tau;
    prev = tau;
  }
  if (l == 1) ratio = 2.0L;  // A_T / A_{T-1}
  RateConstants rc;
  rc.l = l;
  rc.G = static_cast<double>(8.0L * tau * (tau - 1.0L) * ratio);
  rc.T_shift = static_cast<double>(2.0L * tau - (l + 1));
  return rc;
}

DerivedFactors derived_factors(const Schedule& s, double L_eff) {
  const int T = s.T;
  DerivedFactors f;
  f.c.assign(T + 1, 0.0);
  f.cbar.assign(T + 1, 0.0);
  f.d.assign(T + 1, 0.0);
  f.E.assign(T + 1, 0.0);
  f.C.assign(T + 1, 0.0);
  for (int k = 1; k <= T - 1; ++k) {
    f.c[k] = 1.0 / L_eff + s.a[k] * s.B[k];
    f.d[k] = s.b[k] / s.B[k];
  }
  for (int k = 2; k <= T - 1; ++k) {
    f.cbar[k] = s.A[k - 1] * s.b[k - 1] - s.a[k] * s.B[k];
    f.E[k] = s.b[k] / s.b[k - 1];
    f.C[k] = s.b[k] * (L_eff * s.a[k] - 1.0 / s.b[k - 1]);
  }
  if (s.family == Family::OcgmG)
    f.cbar[1] = s.A[1] / (2.0 * s.L_ref * s.a[1]);
  return f;
}

std::vector<double> averaged_rate_coeffs(const Schedule& s) {
  std::vector<double> S(s.T + 1, 0.0);
  for (int k = 2; k <= s.T - 1; ++k) {
    double diff = s.A[k] - s.A[0];
    S[k] = s.B[k] * diff * diff / s.A[0];
  }
  return S;
}

double unified_rate_sweep(int T_max, std::vector<double>* per_T) {
  if (T_max < 2) throw std::invalid_argument("unified_rate_sweep: T_max >= 2");
  double worst = 0.0;
  if (per_T) per_T->assign(T_max + 1, 0.0);
  for (int T = 2; T <= T_max; ++T) {
    auto w = ocgmg_weights(T);
    double v = 2.0 * w.A[0] * (T + 4.0) * (T + 4.0) / w.A[T - 1];
    if (per_T) (*per_T)[T] = v;
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace gnm::schedules
