#pragma once

#include <optional>
#include <vector>

namespace gnm::schedules {

enum class Family { OgmG, OcgmG, Custom };

// Weight sequences for one run of length T. Arrays are stored with direct
// 1-based logical indexing: a[k] for k in 1..T-1 (a[T] additionally set for
// the OcgmG family), A[k] for k in 0..T-1 (plus A[T] for OcgmG), b[k] for
// k in 1..T-1 (plus b[0] for OcgmG), B[k] = B_{k,T} for k in 1..T with
// B[T] = 0 (plus B[0] for OcgmG). Unused slots hold zero.
//
// Invariants (exercised in tests): A[k+1] = A[k] + a[k+1]; B[k] = B[k+1] +
// b[k]; all weights positive; A[0] > 0.
struct Schedule {
  int T = 0;
  Family family = Family::Custom;
  std::vector<double> a;
  std::vector<double> A;
  std::vector<double> b;
  std::vector<double> B;
  double L_ref = 1.0;   // Lipschitz value baked into b and B
  double A_last = 1.0;  // A_{T-1}

  bool has_extended_tail() const { return family == Family::OcgmG; }
};

// theta_{k,T} for k in 0..T, computed in reverse from theta_{T,T} = 0.
std::vector<double> theta_table(int T);

// Smooth gradient-norm schedule: a, b, A, B in closed form over the theta
// table. Final guarantee factor on |g_T|^2 is L*A[0]/A[T-1].
Schedule ogmg_schedule(int T, double L, double A_last = 1.0);

// Composite schedule: (a, A) by the reverse square-root recursion from
// a_T = A_{T-1}, A_T = 2 A_{T-1}; steps b_k = 1/(L0 a_{k+1}).
struct OcgmgWeights {
  int T = 0;
  std::vector<double> a;  // 1..T
  std::vector<double> A;  // 0..T
  double A_last = 1.0;
};
OcgmgWeights ocgmg_weights(int T, double A_last = 1.0);
Schedule ocgmg_schedule(int T, double L0, double A_last = 1.0);

// Assemble a Custom schedule from raw positive weights a[1..T-1],
// b[1..T-1] (0-based input vectors of length T-1) and A0 > 0; accumulators
// are rebuilt by definition. L_ref only feeds derived factors.
Schedule custom_schedule(int T, const std::vector<double>& a_in,
                         const std::vector<double>& b_in, double A0,
                         double L_ref);

// t_k = A_k / a_k. The OcgmG family runs in reverse from t_T = 2 and is
// returned for k in 0..T (t[0] exists only as the extrapolation seed). The
// Fgm family runs forward from t_0 = 0 with t_{k+1}(t_{k+1} - 1) = t_k^2.
enum class TFamily { OcgmG, Fgm };
std::vector<double> t_sequence(int T, TFamily family);

// Reverse accumulators B_{k,T} (k in 0..T) obtained from the quadratic
// one-step recursion; the independent route that must match
// ocgmg_schedule(T, L).B elementwise.
std::vector<double> fistag_accumulators(int T, double L);

// Guarantee constants of the composite last-iterate rate ladder for lag l:
// G_l scales L0/(T + T_l)^2. T-independent; valid whenever T >= l + 2.
struct RateConstants {
  int l = 0;
  double G = 0.0;
  double T_shift = 0.0;
};
RateConstants rate_constants(int l);

// Per-k derived factors of a schedule under a constant Lipschitz estimate:
//   c[k]    = 1/L + a_k B_{k,T}            (k in 1..T-1)
//   cbar[k] = A_{k-1} b_{k-1} - a_k B_{k,T} (k in 2..T-1; cbar[1] set for
//             the OcgmG family extension)
//   d[k]    = b_k / B_{k,T}                (k in 1..T-1; d[T-1] = 1)
//   E[k]    = b_k / b_{k-1}                (k in 2..T-1)
//   C[k]    = b_k (L a_k - 1/b_{k-1})      (k in 2..T-1; 0 for OcgmG)
struct DerivedFactors {
  std::vector<double> c, cbar, d, E, C;
};
DerivedFactors derived_factors(const Schedule& s, double L_eff);

// Averaged-accumulator rate coefficients S_k = B_{k,T} (A_k - A_0)^2 / A_0
// for k in 2..T-1 (zeros elsewhere).
std::vector<double> averaged_rate_coeffs(const Schedule& s);

// max over T in [2, T_max] of 2 A_0 (T + 4)^2 / A_{T-1} for the OcgmG
// weights; the unified-rate sweep.
double unified_rate_sweep(int T_max, std::vector<double>* per_T = nullptr);

}  // namespace gnm::schedules
