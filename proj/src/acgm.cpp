#include "gnm/acgm.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gnm/kernels.hpp"

namespace gnm::engines {

namespace {
double now_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}
const auto process_t0 = std::chrono::steady_clock::now();
}  // namespace

AcgmSolver::AcgmSolver(const CompositeProblem& p, std::span<const double> x0,
                       double L0, double gamma_d, double gamma_u)
    : p_(p), gamma_d_(gamma_d), gamma_u_(gamma_u), x_(x0.begin(), x0.end()),
      v_(x0.begin(), x0.end()), L_(L0), max_L_(0.0) {
  if (!(L0 > 0.0)) throw std::invalid_argument("acgm: L0 must be > 0");
  if (!(gamma_d > 0.0) || gamma_d > 1.0 || !(gamma_u > 1.0))
    throw std::invalid_argument("acgm: need 0 < gamma_d <= 1 < gamma_u");
  auto F0 = p.value(x0);
  if (!F0) throw std::invalid_argument("acgm: infeasible starting point");
  F_x0_ = F_x_ = *F0;
  F_hist_.push_back(F_x0_);
}

void AcgmSolver::step() {
  const int n = p_.dim();
  const Metric& metric = p_.metric();
  double Lk = gamma_d_ * L_;
  Vec y(n), grad, z, xn, diff(n), g;
  for (int trial = 0;; ++trial) {
    double ak = (1.0 + std::sqrt(1.0 + 4.0 * Lk * A_)) / (2.0 * Lk);
    double denom = A_ + ak;
    kern::lincomb(A_ / denom, x_.data(), ak / denom, v_.data(), y.data(), n);
    double fy = p_.smooth_value_grad(y, grad);
    ++oracle_calls_;
    z.assign(y.begin(), y.end());
    metric.add_lowered(-1.0 / Lk, grad, z);
    if (p_.has_regularizer())
      p_.prox(1.0 / Lk, z, xn);
    else
      xn = z;
    double margin = descent_margin(p_, Lk, y, fy, grad, xn);
    bool accepted = margin >= 0.0;
    if (trace)
      trace->ls_events.push_back({phase, k_ + 1, Lk, accepted});
    if (accepted) {
      A_ += ak;
      kern::lincomb(1.0, xn.data(), -1.0, y.data(), diff.data(), n);
      kern::axpy(ak * Lk, diff.data(), v_.data(), n);
      break;
    }
    if (trial >= 200)
      throw std::runtime_error("acgm: line search exceeded 200 increases");
    Lk *= gamma_u_;
  }
  L_ = Lk;
  max_L_ = std::max(max_L_, Lk);
  ++k_;
  x_ = std::move(xn);
  auto F = p_.value(x_);
  if (!F) throw std::runtime_error("acgm: infeasible iterate");
  F_x_ = *F;
  F_hist_.push_back(F_x_);
  if (k_ == 1) {
    x1_ = x_;
    F_x1_ = F_x_;
  }
  kern::lincomb(1.0, y.data(), -1.0, x_.data(), diff.data(), n);
  last_gmap_ = Lk * metric.primal_norm(diff);
  if (trace) {
    trace->rows.push_back({k_, call_offset + oracle_calls_, phase, Lk, F_x_,
                           last_gmap_, std::nan(""),
                           record_timings ? now_since(process_t0) : 0.0});
  }
}

AcgmResult run_acgm(const CompositeProblem& p, std::span<const double> x0,
                    double L0, double gamma_d, double gamma_u,
                    const AcgmStop& stop, bool keep_trace,
                    bool record_timings) {
  AcgmSolver solver(p, x0, L0, gamma_d, gamma_u);
  AcgmResult res;
  res.trace.method = "acgm";
  res.trace.n = p.dim();
  res.trace.L0 = L0;
  res.trace.problem = p.name;
  res.trace.F_x0 = solver.F_x0();
  res.trace.rows.push_back(
      {0, 0, "acgm", L0, solver.F_x0(), std::nan(""), std::nan(""), 0.0});
  if (keep_trace) {
    solver.trace = &res.trace;
    solver.record_timings = record_timings;
  }
  while (true) {
    if (solver.iterations() >= stop.max_iterations) break;
    if (solver.oracle_calls() >= stop.oracle_budget) break;
    solver.step();
    if (solver.A() >= stop.A_threshold) break;
    if (stop.predicate && stop.predicate(solver)) {
      res.stopped_by_predicate = true;
      break;
    }
  }
  res.r = solver.best();
  res.F_r = solver.F_best();
  res.A = solver.A();
  res.iterations = solver.iterations();
  res.max_L = solver.max_L();
  res.last_L = solver.last_L();
  res.oracle_calls = solver.oracle_calls();
  res.trace.T = res.iterations;
  res.trace.oracle_calls = res.oracle_calls;
  res.trace.x_T = res.r;
  res.trace.F_out = res.F_r;
  res.trace.L_T = res.last_L;
  return res;
}

RacgmResult run_racgm(const CompositeProblem& p, std::span<const double> r0,
                      const RacgmOptions& opts) {
  if (!(opts.sigma > 0.0) || !(opts.sigma < 0.5))
    throw std::invalid_argument("racgm: sigma must lie in (0, 1/2)");
  if (!(opts.s_mult > 1.0))
    throw std::invalid_argument("racgm: s_mult must be > 1");

  Vec r(r0.begin(), r0.end());
  if (!p.value(r)) p.prox(1.0, r0, r);  // make the start feasible

  RacgmResult res;
  res.trace.method = "racgm";
  res.trace.n = p.dim();
  res.trace.L0 = opts.L0;
  res.trace.problem = p.name;
  res.trace.F_x0 = *p.value(r);

  const double ratio = opts.sigma / (1.0 - opts.sigma);
  const double sqrt_s = std::sqrt(opts.s_mult);
  long long calls = 0;

  auto record_restart = [&](const Vec& pt, double F_pt, double L_est) {
    res.F_restarts.push_back(F_pt);
    Vec g = gradient_mapping(p, L_est, pt);
    res.gnorm_restarts.push_back(p.metric().dual_norm(g));
  };
  record_restart(r, res.trace.F_x0, opts.L0);

  // Reference step: run under the stall heuristic on the value history.
  AcgmStop stop0;
  stop0.oracle_budget = opts.oracle_budget;
  stop0.max_iterations = opts.e0_iteration_cap;
  stop0.predicate = [&](const AcgmSolver& s) {
    int k = s.iterations();
    if (k < 2) return false;
    int m = static_cast<int>(std::ceil(k / sqrt_s));
    if (m < 1) return false;
    const auto& F = s.value_history();
    return F[m] - F[k] <= ratio * (F[0] - F[m]);
  };
  AcgmResult ref =
      run_acgm(p, r, opts.L0, opts.gamma_d, opts.gamma_u, stop0, true,
               opts.record_timings);
  res.trace.absorb(ref.trace, "acgm:0", calls);
  calls += ref.oracle_calls;
  r = ref.r;
  double F_prev = res.trace.F_x0;
  double F_cur = ref.F_r;
  double Ubar = ref.A;
  res.thresholds.push_back(Ubar);
  res.inner_iterations.push_back(ref.iterations);
  record_restart(r, F_cur, ref.last_L);

  res.best = r;
  res.F_best = F_cur;
  res.budget_exhausted = calls >= opts.oracle_budget;

  for (int j = 1; !res.budget_exhausted; ++j) {
    AcgmStop stop;
    stop.A_threshold = Ubar;
    stop.oracle_budget = opts.oracle_budget - calls;
    AcgmResult step =
        run_acgm(p, r, opts.L0, opts.gamma_d, opts.gamma_u, stop, true,
                 opts.record_timings);
    res.trace.absorb(step.trace, "acgm:" + std::to_string(j), calls);
    calls += step.oracle_calls;
    double F_next = step.F_r;
    res.inner_iterations.push_back(step.iterations);
    record_restart(step.r, F_next, step.last_L);
    if (F_next <= res.F_best) {
      res.best = step.r;
      res.F_best = F_next;
    }
    if (calls >= opts.oracle_budget) {
      res.budget_exhausted = true;
      res.thresholds.push_back(Ubar);
      break;
    }
    // Threshold adjustment: stalled progress widens the next window.
    if (!(F_cur - F_next <= ratio * (F_prev - F_cur))) {
      ++res.adjustments;
      Ubar *= opts.s_mult;
    }
    res.thresholds.push_back(Ubar);
    F_prev = F_cur;
    F_cur = F_next;
    r = step.r;
  }
  res.oracle_calls = calls;
  res.trace.oracle_calls = calls;
  res.trace.T = static_cast<int>(res.trace.rows.size());
  res.trace.x_T = res.best;
  res.trace.F_out = res.F_best;
  return res;
}

}  // namespace gnm::engines
