#include "gnm/certificates.hpp"

#include <cmath>
#include <stdexcept>

namespace gnm::analysis {

namespace {

CheckResult make_check(std::string name, double lhs, double rhs,
                       double tolerance = 1e-9, bool asserted = true) {
  CheckResult c;
  c.name = std::move(name);
  c.scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  c.slack = rhs - lhs;
  c.tolerance = tolerance;
  c.pass = c.slack >= -tolerance * c.scale;
  c.asserted = asserted;
  return c;
}

// Rows of the (single) phase keyed by k; throws on multi-phase traces.
std::vector<const TraceRow*> rows_by_k(const RunTrace& tr, int T) {
  std::vector<const TraceRow*> at(T + 1, nullptr);
  for (const auto& r : tr.rows) {
    if (r.k < 0 || r.k > T) continue;
    at[r.k] = &r;
  }
  for (int k = 0; k <= T; ++k) {
    if (tr.linesearch_failure && k > tr.failure_k) break;
    if (!at[k]) throw std::runtime_error("certificates: missing trace row");
  }
  return at;
}

}  // namespace

double aggregator_identity_residual(const RunTrace& trace,
                                    const schedules::Schedule& sched,
                                    const Metric& metric) {
  if (!trace.has_vectors)
    throw std::invalid_argument(
        "aggregator_identity_residual: trace lacks iterate snapshots");
  const int T = sched.T;
  if (T < 2 || trace.T != T)
    throw std::invalid_argument(
        "aggregator_identity_residual: trace/schedule length mismatch");
  const double L = sched.L_ref;
  const auto& a = sched.a;
  const auto& A = sched.A;
  const auto& b = sched.b;
  const auto& B = sched.B;

  const int n = trace.n;
  Vec diff(n);
  double G1 = 0.0;
  for (int k = 0; k <= T - 1; ++k) {
    for (int i = 0; i < n; ++i) diff[i] = trace.x[k][i] - trace.y[k + 1][i];
    G1 += A[k] * pairing(trace.g[k + 1], diff);
  }
  double G2 = 0.0;
  for (int k = 1; k <= T - 1; ++k) {
    for (int i = 0; i < n; ++i) diff[i] = trace.x[T][i] - trace.y[k][i];
    G2 += a[k] * pairing(trace.g[k], diff);
  }

  double rhs = 0.0;
  for (int k = 1; k <= T - 1; ++k) {
    double c_k = 1.0 / L + a[k] * B[k];
    double gn = metric.dual_norm(trace.g[k]);
    rhs -= a[k] * c_k * gn * gn;
  }
  double D = 0.0;
  for (int k = 1; k <= T - 2; ++k) {
    double w = A[k] * b[k] - 1.0 / L - 2.0 * a[k + 1] * B[k + 1];
    D += w * metric.dual_inner(trace.s[k], trace.g[k + 1]);
  }
  D += (A[T - 1] * b[T - 1] - 1.0 / L) *
       metric.dual_inner(trace.s[T - 1], trace.g[T]);
  rhs += D;

  double lhs = G1 + G2;
  return std::fabs(lhs - rhs) /
         std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
}

CertificateReport midway_certificates(const RunTrace& trace,
                                      const schedules::Schedule& sched) {
  using schedules::Family;
  const int T = sched.T;
  CertificateReport rep;
  auto at = rows_by_k(trace, T);
  const double F0 = at[0]->F_x;
  const double L = sched.L_ref;
  const int k_max = trace.linesearch_failure ? trace.failure_k - 1 : T;

  if (sched.family == Family::OgmG) {
    for (int k = 1; k <= std::min(k_max, T - 1); ++k) {
      double s_norm = at[k]->savg_norm * (sched.A[k] - sched.A[0]);
      rep.checks.push_back(make_check(
          "accumulator.k" + std::to_string(k),
          sched.B[k] * s_norm * s_norm, sched.A[0] * (F0 - at[k]->F_x)));
      double sav = at[k]->savg_norm;
      rep.checks.push_back(make_check(
          "averaged.k" + std::to_string(k), sav * sav,
          4.0 * L / (static_cast<double>(k) * k) * (F0 - at[k]->F_x)));
    }
    return rep;
  }

  if (sched.family != Family::OcgmG)
    throw std::invalid_argument("midway_certificates: unsupported family");

  auto S = schedules::averaged_rate_coeffs(sched);
  auto R = averaged_rate_floor(T);
  for (int k = 1; k <= k_max; ++k) {
    double g = at[k]->gmap_norm;
    double lead = sched.a[k] / (2.0 * L) * g * g;
    if (k <= T - 1) {
      double s_norm = at[k]->savg_norm * (sched.A[k] - sched.A[0]);
      rep.checks.push_back(make_check(
          "mapping-accumulator.k" + std::to_string(k),
          lead + sched.B[k] * s_norm * s_norm,
          sched.A[0] * (F0 - at[k]->F_x)));
    } else {
      rep.checks.push_back(make_check("mapping-accumulator.k" +
                                          std::to_string(k),
                                      lead, sched.A[0] * (F0 - at[k]->F_x)));
    }
    if (k >= 2 && k <= T - 1) {
      double sav = at[k]->savg_norm;
      rep.checks.push_back(
          make_check("averaged-mapping.k" + std::to_string(k),
                     lead / sched.A[0] + S[k] * sav * sav, F0 - at[k]->F_x));
      rep.checks.push_back(make_check(
          "avg-rate-floor.k" + std::to_string(k),
          R[k] * static_cast<double>(k) * k / L, S[k], 1e-9));
      double floor = k <= T - 3 ? 0.05 : (k == T - 2 ? 0.048 : 0.03);
      rep.checks.push_back(make_check(
          "rate-floor-threshold.k" + std::to_string(k), floor, R[k], 0.0));
    }
  }
  return rep;
}

CertificateReport final_certificate(const RunTrace& trace,
                                    const schedules::Schedule& sched) {
  using schedules::Family;
  const int T = sched.T;
  CertificateReport rep;
  auto at = rows_by_k(trace, T);
  const double F0 = at[0]->F_x;
  const double L = sched.L_ref;

  if (trace.linesearch_failure) {
    rep.checks.push_back(
        make_check("final.completed", 1.0, 0.0, 0.0));  // fails by design
    return rep;
  }
  const double g_T = at[T]->gmap_norm;
  const double F_T = at[T]->F_x;

  if (sched.family == Family::OgmG) {
    double factor = L * sched.A[0] / sched.A_last;
    rep.checks.push_back(
        make_check("final.bound", g_T * g_T, factor * (F0 - F_T)));
    auto th = schedules::theta_table(T);
    double alt = 2.0 * L / (th[0] * th[0]);
    rep.checks.push_back(make_check("final.factor-identity",
                                    std::fabs(factor - alt) / factor, 0.0,
                                    1e-12));
    rep.checks.push_back(make_check("final.factor-below-4LT2", factor,
                                    4.0 * L / (static_cast<double>(T) * T),
                                    1e-12));
    return rep;
  }
  if (sched.family != Family::OcgmG)
    throw std::invalid_argument("final_certificate: unsupported family");

  double factor = 2.0 * sched.A[0] * L / sched.A_last;
  rep.checks.push_back(
      make_check("final.bound", g_T * g_T, factor * (F0 - F_T)));
  rep.checks.push_back(make_check("final.monotone", F_T, F0));
  rep.checks.push_back(make_check(
      "final.unified-56.67", factor * (T + 4.0) * (T + 4.0) / L, 56.67, 1e-12));
  for (int l : {1, 2, 5, 10, 100, 1000}) {
    if (l > T - 2) break;
    auto rc = schedules::rate_constants(l);
    rep.checks.push_back(make_check(
        "final.ladder.l" + std::to_string(l), factor,
        rc.G * L / ((T + rc.T_shift) * (T + rc.T_shift)), 1e-12));
  }
  return rep;
}

CertificateMatrix psd_certificate(const schedules::Schedule& sched,
                                  double L_eff) {
  const int T = sched.T;
  CertificateMatrix cm;
  cm.T = T;
  cm.C.assign(static_cast<std::size_t>(T) * T, 0.0);
  auto idx = [T](int i, int j) {
    return static_cast<std::size_t>(i - 1) * T + (j - 1);
  };
  const double L = L_eff;
  for (int i = 1; i <= T - 1; ++i)
    cm.C[idx(i, i)] =
        sched.A[i] / (2.0 * L) - sched.a[i] / L - sched.a[i] * sched.a[i] * sched.B[i];
  if (sched.has_extended_tail())
    cm.C[idx(T, T)] = sched.A[T] / (2.0 * L) - sched.a[T] / L -
                      sched.a[T] * sched.a[T] * sched.B[T];
  for (int j = 2; j <= T - 1; ++j) {
    double w = sched.A[j - 1] * sched.b[j - 1] - 1.0 / L -
               2.0 * sched.a[j] * sched.B[j];
    for (int i = 1; i < j; ++i) cm.C[idx(i, j)] = sched.a[i] * w;
  }
  {
    double w = sched.A[T - 1] * sched.b[T - 1] - 1.0 / L;
    for (int i = 1; i < T; ++i) cm.C[idx(i, T)] = sched.a[i] * w;
  }
  for (double v : cm.C) cm.max_abs = std::max(cm.max_abs, std::fabs(v));

  std::vector<double> sym(cm.C.size());
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j)
      sym[static_cast<std::size_t>(i) * T + j] =
          0.5 * (cm.C[static_cast<std::size_t>(i) * T + j] +
                 cm.C[static_cast<std::size_t>(j) * T + i]);
  cm.min_eig_sym = min_eigenvalue_sym(std::move(sym), T);
  // Tolerance scale: the natural magnitude of the matrix ingredients, so a
  // matrix that is zero through cancellation still passes.
  double ing = std::max(cm.max_abs, sched.A_last / (2.0 * L));
  cm.psd = cm.min_eig_sym >= -1e-10 * ing;

  double denom = sched.A_last / (2.0 * L) - cm.C[idx(T, T)];
  if (denom > 0.0)
    cm.guarantee_factor = sched.A[0] / denom;
  return cm;
}

std::vector<double> gram_matrix(const RunTrace& trace, const Metric& metric) {
  if (!trace.has_vectors)
    throw std::invalid_argument("gram_matrix: trace lacks iterate snapshots");
  const int T = trace.T;
  std::vector<double> Q(static_cast<std::size_t>(T) * T);
  for (int i = 1; i <= T; ++i)
    for (int j = i; j <= T; ++j) {
      double v = metric.dual_inner(trace.g[i], trace.g[j]);
      Q[static_cast<std::size_t>(i - 1) * T + (j - 1)] = v;
      Q[static_cast<std::size_t>(j - 1) * T + (i - 1)] = v;
    }
  return Q;
}

double min_eigenvalue_sym(std::vector<double> m, int n) {
  if (n == 0) return 0.0;
  auto at = [&m, n](int i, int j) -> double& {
    return m[static_cast<std::size_t>(i) * n + j];
  };
  double frob = 0.0;
  for (double v : m) frob += v * v;
  frob = std::sqrt(frob);
  if (frob == 0.0) return 0.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * at(i, j) * at(i, j);
    if (std::sqrt(off) <= 1e-14 * frob) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = at(p, q);
        if (apq == 0.0) continue;
        double app = at(p, p), aqq = at(q, q);
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) /
                   (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
  }
  double lo = at(0, 0);
  for (int i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
  return lo;
}

double eta(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 0.5))
    throw std::invalid_argument("eta: sigma must lie in (0, 1/2)");
  const double e_half = 1.3591409142295226;  // e/2
  return -e_half * std::sqrt(sigma) * std::log(sigma / (1.0 - sigma));
}

EtaMax maximize_eta() {
  double best_s = 1e-6, best_v = -1.0;
  for (long i = 1; i < 500000; ++i) {
    double s = static_cast<double>(i) * 1e-6;
    double v = eta(s);
    if (v > best_v) {
      best_v = v;
      best_s = s;
    }
  }
  // Golden-section refine around the grid winner.
  const double gr = 0.6180339887498949;
  double lo = std::max(best_s - 2e-6, 1e-9);
  double hi = std::min(best_s + 2e-6, 0.5 - 1e-9);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = eta(x1), f2 = eta(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = eta(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = eta(x1);
    }
  }
  EtaMax out;
  out.sigma_star = 0.5 * (lo + hi);
  out.eta_star = eta(out.sigma_star);
  return out;
}

double q_func(double x) {
  if (!(x > 1.0)) throw std::invalid_argument("q: x must be > 1");
  return (x - 1.0) * (x - 1.0) / x;
}

double r_func(double x, double kappa) {
  if (!(x > 1.0)) throw std::invalid_argument("r: x must be > 1");
  if (!(kappa >= 2.0)) throw std::invalid_argument("r: kappa must be >= 2");
  double arg = (0.5 * kappa + x - 1.0);
  return q_func(arg * arg / (x * (x - 1.0))) / (kappa * kappa);
}

double rbar_func(double x, double kappa) {
  return (x - 1.0) * (x - 3.0) * r_func(x, kappa);
}

std::vector<double> averaged_rate_floor(int T) {
  auto t = schedules::t_sequence(T, schedules::TFamily::OcgmG);
  std::vector<double> R(T + 1, 0.0);
  for (int k = 2; k <= T - 1; ++k)
    R[k] = 0.5 * t[k] * (t[k] - 2.0) * r_func(t[k - 1], k);
  return R;
}

double meta_bound(long long N, int b, double L_u, double d, bool resume) {
  if (N < 1 || b < 0 || !(L_u > 0.0) || d < 0.0)
    throw std::invalid_argument("meta_bound: bad arguments");
  double base = resume ? (3.0 + b) : (4.0 + b);
  return 10.65 * base * base * L_u / (static_cast<double>(N) * N) * d;
}

double meta_cycle_bound(int T_j, double L_u, double d) {
  double t2 = static_cast<double>(T_j) * T_j;
  return 113.34 * L_u * L_u / (t2 * t2) * d * d;
}

}  // namespace gnm::analysis
