#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gnm/schedules.hpp"
#include "gnm/space.hpp"
#include "gnm/trace.hpp"

namespace gnm::analysis {

// One numerically evaluated runtime guarantee. Slack is rhs - lhs for an
// inequality lhs <= rhs (nonnegative slack means it holds) and -|residual|
// for identities, so the sign convention is uniform. A check passes when
// slack >= -tolerance * scale.
struct CheckResult {
  std::string name;
  double slack = 0.0;
  double scale = 1.0;
  double tolerance = 1e-9;
  bool pass = false;
  bool asserted = true;  // informational rows never fail the report
};

struct CertificateReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (c.asserted && !c.pass) return false;
    return true;
  }
  int failures() const {
    int f = 0;
    for (const auto& c : checks)
      if (c.asserted && !c.pass) ++f;
    return f;
  }
};

// ---- trace-level checks ------------------------------------------------

// Residual of the weighted-sum identity tying the two gradient aggregators
// to the diagonal norm terms and the cross-term sum; an algebraic identity
// of the template, independent of the problem. Requires vector snapshots.
double aggregator_identity_residual(const RunTrace& trace,
                                    const schedules::Schedule& sched,
                                    const Metric& metric);

// Per-iteration runtime guarantees (accumulator, averaged accumulator,
// per-k mapping) for a finished run of the given family. Works from the
// scalar rows; `start_row` selects the k = 0 row of the phase to check.
CertificateReport midway_certificates(const RunTrace& trace,
                                      const schedules::Schedule& sched);

// Last-iterate guarantees plus the guarantee-factor ladder.
CertificateReport final_certificate(const RunTrace& trace,
                                    const schedules::Schedule& sched);

// ---- schedule-level checks ----------------------------------------------

struct CertificateMatrix {
  int T = 0;
  std::vector<double> C;  // T*T row-major, upper triangular
  double max_abs = 0.0;
  double min_eig_sym = 0.0;  // smallest eigenvalue of (C + C')/2
  bool psd = false;
  std::optional<double> guarantee_factor;  // A0 / (A_{T-1}/(2 L_T) - C_TT)
};

// Builds the quadratic-form certificate matrix of a schedule under
// constant estimates L_k = L_eff and delivers a PSD verdict. A zero matrix
// is the signature of the composite family's weight choice.
CertificateMatrix psd_certificate(const schedules::Schedule& sched,
                                  double L_eff);

// Gram matrix Q_{ij} = <g_i, B^{-1} g_j> of a trace with snapshots.
std::vector<double> gram_matrix(const RunTrace& trace, const Metric& metric);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi).
double min_eigenvalue_sym(std::vector<double> m, int n);

// ---- scalar functions ----------------------------------------------------

// Restart efficiency eta(sigma) on (0, 1/2).
double eta(double sigma);
struct EtaMax {
  double sigma_star = 0.0;
  double eta_star = 0.0;
};
// Grid search at 1e-6 resolution followed by a golden-section refine.
EtaMax maximize_eta();

// Scalar rate functions: q(x) = (x-1)^2/x, r(x, kappa) =
// q(((kappa/2 + x - 1)^2)/(x(x-1)))/kappa^2, rbar = (x-1)(x-3) r.
double q_func(double x);
double r_func(double x, double kappa);
double rbar_func(double x, double kappa);

// Averaged-mapping rate floor R_k = t_k (t_k - 2) r(t_{k-1}, k) / 2 for
// k in 2..T-1 (zeros elsewhere).
std::vector<double> averaged_rate_floor(int T);

// Worst-case mapping norm envelope after N combined iterations with b
// failed instances: 10.65 (4 + b)^2 L_u d / N^2, the (3 + b)^2 variant
// when `resume`.
double meta_bound(long long N, int b, double L_u, double d, bool resume);
// Per-cycle envelope 113.34 L_u^2 d^2 / T_j^4.
double meta_cycle_bound(int T_j, double L_u, double d);

}  // namespace gnm::analysis
