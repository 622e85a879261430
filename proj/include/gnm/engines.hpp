#pragma once

#include <span>
#include <string>

#include "gnm/problem.hpp"
#include "gnm/schedules.hpp"
#include "gnm/trace.hpp"

namespace gnm::engines {

// The four equivalent realizations of the weighted accumulator template.
// Canonical steps along the accumulated direction s_k; Extrapolated uses
// two-point momentum plus a correction; OneAux blends the gradient-step
// point with an additively updated auxiliary iterate; TwoAux carries both
// s_k and v_k. All produce the same iterates up to rounding.
enum class Form { Canonical, Extrapolated, OneAux, TwoAux };

Form form_from_string(const std::string& s);
std::string to_string(Form f);

struct RunOptions {
  Form form = Form::Canonical;
  bool keep_vectors = false;
  bool check_descent = false;  // verify the estimate at every oracle point
  bool record_timings = false;
  std::string phase;
};

// Executes the template with the weights of `sched` and the constant
// Lipschitz estimate sched.L_ref for sched.T iterations. T = 1 collapses
// to one proximal gradient step (weights unused).
RunTrace run_template(const CompositeProblem& p, const schedules::Schedule& sched,
                      std::span<const double> x0, const RunOptions& opts = {});

// Convenience wrapper over raw positive weights a[1..T-1], b[1..T-1].
RunTrace run_template(const CompositeProblem& p, std::span<const double> x0,
                      const std::vector<double>& a,
                      const std::vector<double>& b, double A0, double L, int T,
                      const RunOptions& opts = {});

// Smooth gradient-norm method (rejects regularized problems). Guarantees
// |g_T|^2 <= (L A_0 / A_{T-1}) (f(x_0) - f(x_T)) < (4L/T^2)(...).
RunTrace run_ogmg(const CompositeProblem& p, std::span<const double> x0,
                  double L, int T, const RunOptions& opts = {});

// Composite gradient-mapping method with the guess-and-check estimate L0.
// On success |g_T|_*^2 <= (2 A_0 L0 / A_{T-1}) (F(x_0) - F(x_T)); on a
// failed check the trace carries the partial outputs and the failure flag.
RunTrace run_ocgmg(const CompositeProblem& p, std::span<const double> x0,
                   double L0, int T, const RunOptions& opts = {});

enum class Reduced { Fista, FistaG };

// Fixed-L two-point variants driven purely by the t-sequence. FistaG is
// iterate-equivalent to extrapolated run_ocgmg at the same L.
RunTrace run_reduced(const CompositeProblem& p, std::span<const double> x0,
                     double L, int T, Reduced which, bool keep_vectors = false,
                     bool record_timings = false);

// Plain proximal gradient descent with backtracking; baseline method.
struct GmOptions {
  double L0 = 1.0;
  double gamma_d = 1.0;
  double gamma_u = 2.0;
  long long max_oracle_calls = 1000;
  double eps = 0.0;  // stop when |g_k|_* <= eps (0 disables)
  bool record_timings = false;
};
RunTrace run_gm(const CompositeProblem& p, std::span<const double> x0,
                const GmOptions& opts);

}  // namespace gnm::engines
