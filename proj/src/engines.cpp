#include "gnm/engines.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gnm/kernels.hpp"

namespace gnm::engines {

Form form_from_string(const std::string& s) {
  if (s == "canonical") return Form::Canonical;
  if (s == "extrapolated") return Form::Extrapolated;
  if (s == "one-aux") return Form::OneAux;
  if (s == "two-aux") return Form::TwoAux;
  throw std::invalid_argument("unknown form: " + s);
}

std::string to_string(Form f) {
  switch (f) {
    case Form::Canonical: return "canonical";
    case Form::Extrapolated: return "extrapolated";
    case Form::OneAux: return "one-aux";
    case Form::TwoAux: return "two-aux";
  }
  return "?";
}

namespace {

double feasible_value(const CompositeProblem& p, std::span<const double> x) {
  auto v = p.value(x);
  if (!v) throw std::runtime_error("engine: iterate left the feasible set");
  return *v;
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled) {
    if (enabled_) start_ = std::chrono::steady_clock::now();
  }
  double elapsed() const {
    if (!enabled_) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

struct StepResult {
  Vec x;       // T_L(y)
  Vec g;       // L B (y - x)
  double F_x;  // F at the new gradient-step point
  double margin;  // descent slack, only when requested
};

// One oracle iteration at y with estimate L; counts one gradient+prox pair.
StepResult oracle_step(const CompositeProblem& p, double L,
                       std::span<const double> y, bool want_margin,
                       long long& oracle_calls) {
  StepResult r;
  Vec grad;
  double fy = p.smooth_value_grad(y, grad);
  if (!all_finite(grad))
    throw std::runtime_error("engine: non-finite gradient");
  ++oracle_calls;
  Vec z(y.begin(), y.end());
  p.metric().add_lowered(-1.0 / L, grad, z);
  if (p.has_regularizer())
    p.prox(1.0 / L, z, r.x);
  else
    r.x = std::move(z);
  Vec diff(y.size());
  kern::lincomb(1.0, y.data(), -1.0, r.x.data(), diff.data(), y.size());
  p.metric().raise(diff, L, r.g);
  if (!all_finite(r.x)) throw std::runtime_error("engine: non-finite iterate");
  r.margin = want_margin ? descent_margin(p, L, y, fy, grad, r.x) : 0.0;
  r.F_x = feasible_value(p, r.x);
  return r;
}

}  // namespace

RunTrace run_template(const CompositeProblem& p,
                      const schedules::Schedule& sched,
                      std::span<const double> x0, const RunOptions& opts) {
  const int T = sched.T;
  const int n = p.dim();
  const double L = sched.L_ref;
  if (T < 1) throw std::invalid_argument("run_template: T must be >= 1");
  if (x0.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("run_template: dimension mismatch");
  const Metric& metric = p.metric();
  Stopwatch clock(true);

  RunTrace tr;
  tr.method = "template";
  tr.form = to_string(opts.form);
  tr.T = T;
  tr.n = n;
  tr.L0 = L;
  tr.A_last = sched.A_last;
  tr.problem = p.name;
  const std::string phase = opts.phase.empty() ? tr.method : opts.phase;

  tr.F_x0 = feasible_value(p, x0);
  tr.rows.push_back({0, 0, phase, L, tr.F_x0, std::nan(""), std::nan(""), 0.0});
  if (opts.keep_vectors) {
    tr.has_vectors = true;
    tr.x.assign(T + 1, {});
    tr.y.assign(T + 1, {});
    tr.g.assign(T + 1, {});
    tr.s.assign(T + 1, {});
    tr.v.assign(T + 1, {});
    tr.x[0].assign(x0.begin(), x0.end());
  }

  const std::vector<double>& a = sched.a;
  const std::vector<double>& b = sched.b;
  const std::vector<double>& A = sched.A;
  const std::vector<double>& B = sched.B;

  Vec x_prev;                      // x_{k-1}
  Vec x_cur(x0.begin(), x0.end()); // x_k
  Vec y_cur;                       // y_k
  Vec s(n, 0.0);                   // accumulator s_k (shadowed in all forms)
  Vec v(x0.begin(), x0.end());     // auxiliary iterate v_k
  Vec g1;                          // g_1, needed by the extrapolated form
  Vec y_next(n);

  if (opts.keep_vectors) {
    tr.s[0] = s;
    tr.v[0] = v;
  }

  for (int k = 0; k <= T - 1; ++k) {
    // Oracle point for iteration k+1.
    if (k == 0) {
      y_next.assign(x0.begin(), x0.end());
    } else {
      switch (opts.form) {
        case Form::Canonical:
          y_next = x_cur;
          metric.add_lowered(-b[k], s, y_next);
          break;
        case Form::Extrapolated:
          if (k == 1) {
            y_next = x_cur;
            metric.add_lowered(-b[1] * a[1], g1, y_next);
          } else {
            double E = b[k] / b[k - 1];
            double C = b[k] * (L * a[k] - 1.0 / b[k - 1]);
            for (int i = 0; i < n; ++i)
              y_next[i] = x_cur[i] + E * (x_cur[i] - x_prev[i]) +
                          C * (x_cur[i] - y_cur[i]);
          }
          break;
        case Form::OneAux:
          if (k == T - 1) {
            y_next = v;  // y_T = v_{T-1}
          } else {
            kern::lincomb(B[k + 1] / B[k], x_cur.data(), b[k] / B[k], v.data(),
                          y_next.data(), n);
          }
          break;
        case Form::TwoAux:
          if (k == T - 1) {
            y_next = v;
          } else {
            double cbar = A[k] * b[k] - a[k + 1] * B[k + 1];
            kern::lincomb(A[k] / A[k + 1], x_cur.data(), a[k + 1] / A[k + 1],
                          v.data(), y_next.data(), n);
            metric.add_lowered(-cbar / A[k + 1], s, y_next);
          }
          break;
      }
    }

    StepResult st =
        oracle_step(p, L, y_next, opts.check_descent, tr.oracle_calls);
    if (k == 0) g1 = st.g;

    if (opts.check_descent && st.margin < 0.0) {
      tr.linesearch_failure = true;
      tr.failure_k = k + 1;
      tr.rows.push_back({k + 1, tr.oracle_calls, phase, L, st.F_x,
                         metric.dual_norm(st.g), std::nan(""),
                         clock.elapsed()});
      tr.ls_events.push_back({phase, k + 1, L, false});
      tr.y_T = y_next;
      tr.g_T = st.g;
      tr.x_T = std::move(st.x);
      tr.L_T = L;
      tr.F_out = st.F_x;
      return tr;
    }

    double savg = std::nan("");
    if (k < T - 1) {
      kern::axpy(a[k + 1], st.g.data(), s.data(), n);
      if (opts.form == Form::OneAux || opts.form == Form::TwoAux) {
        double c = 1.0 / L + a[k + 1] * B[k + 1];
        metric.add_lowered(-c, st.g, v);
      }
      savg = metric.dual_norm(s) / (A[k + 1] - A[0]);
    }

    tr.rows.push_back({k + 1, tr.oracle_calls, phase, L, st.F_x,
                       metric.dual_norm(st.g), savg, clock.elapsed()});
    if (opts.keep_vectors) {
      tr.y[k + 1] = y_next;
      tr.x[k + 1] = st.x;
      tr.g[k + 1] = st.g;
      if (k < T - 1) {
        tr.s[k + 1] = s;
        if (opts.form == Form::OneAux || opts.form == Form::TwoAux)
          tr.v[k + 1] = v;
      }
    }

    if (k == T - 1) {
      tr.y_T = y_next;
      tr.g_T = st.g;
      tr.x_T = std::move(st.x);
      tr.L_T = L;
      tr.F_out = st.F_x;
      break;
    }

    x_prev = std::move(x_cur);
    x_cur = std::move(st.x);
    y_cur = y_next;
  }
  return tr;
}

RunTrace run_template(const CompositeProblem& p, std::span<const double> x0,
                      const std::vector<double>& a,
                      const std::vector<double>& b, double A0, double L, int T,
                      const RunOptions& opts) {
  if (T == 1) {
    // Degenerate case: one gradient-method step, weights unused.
    schedules::Schedule s;
    s.T = 1;
    s.L_ref = L;
    s.A_last = A0;
    s.a.assign(2, 0.0);
    s.A.assign(2, A0);
    s.b.assign(2, 0.0);
    s.B.assign(2, 0.0);
    return run_template(p, s, x0, opts);
  }
  auto sched = schedules::custom_schedule(T, a, b, A0, L);
  return run_template(p, sched, x0, opts);
}

RunTrace run_ogmg(const CompositeProblem& p, std::span<const double> x0,
                  double L, int T, const RunOptions& opts) {
  if (p.has_regularizer())
    throw std::invalid_argument(
        "run_ogmg: smooth problems only (regularizer present)");
  if (T == 1) {
    schedules::Schedule s;
    s.T = 1;
    s.L_ref = L;
    s.A_last = 1.0;
    s.a.assign(2, 0.0);
    s.A.assign(2, 1.0);
    s.b.assign(2, 0.0);
    s.B.assign(2, 0.0);
    RunTrace tr = run_template(p, s, x0, opts);
    tr.method = "ogmg";
    return tr;
  }
  auto sched = schedules::ogmg_schedule(T, L);
  RunOptions o = opts;
  if (o.phase.empty()) o.phase = "ogmg";
  RunTrace tr = run_template(p, sched, x0, o);
  tr.method = "ogmg";
  return tr;
}

RunTrace run_ocgmg(const CompositeProblem& p, std::span<const double> x0,
                   double L0, int T, const RunOptions& opts) {
  auto sched = schedules::ocgmg_schedule(T, L0);
  RunOptions o = opts;
  o.check_descent = true;
  if (o.phase.empty()) o.phase = "ocgmg";
  RunTrace tr = run_template(p, sched, x0, o);
  tr.method = "ocgmg";
  return tr;
}

RunTrace run_reduced(const CompositeProblem& p, std::span<const double> x0,
                     double L, int T, Reduced which, bool keep_vectors,
                     bool record_timings) {
  if (T < 2) throw std::invalid_argument("run_reduced: T must be >= 2");
  const int n = p.dim();
  const Metric& metric = p.metric();
  Stopwatch clock(true);
  (void)record_timings;

  auto t = schedules::t_sequence(
      T, which == Reduced::FistaG ? schedules::TFamily::OcgmG
                                  : schedules::TFamily::Fgm);

  RunTrace tr;
  tr.method = which == Reduced::FistaG ? "fistag" : "fista";
  tr.form = "extrapolated";
  tr.T = T;
  tr.n = n;
  tr.L0 = L;
  tr.problem = p.name;
  const std::string phase = tr.method;
  tr.F_x0 = feasible_value(p, x0);
  tr.rows.push_back({0, 0, phase, L, tr.F_x0, std::nan(""), std::nan(""), 0.0});
  if (keep_vectors) {
    tr.has_vectors = true;
    tr.x.assign(T + 1, {});
    tr.y.assign(T + 1, {});
    tr.g.assign(T + 1, {});
    tr.x[0].assign(x0.begin(), x0.end());
  }

  // Shadow accumulator with the composite weights, for the savg column and
  // certificate checks on FistaG traces; does not enter the updates.
  schedules::OcgmgWeights w;
  Vec s(n, 0.0);
  if (which == Reduced::FistaG) w = schedules::ocgmg_weights(T);

  Vec x_prev(x0.begin(), x0.end());  // x_{-1} = x_0
  Vec x_cur(x0.begin(), x0.end());
  Vec y_next(n);
  for (int k = 0; k <= T - 1; ++k) {
    double factor = which == Reduced::FistaG ? (t[k + 1] - 1.0) / t[k]
                                             : (t[k] - 1.0) / t[k + 1];
    for (int i = 0; i < n; ++i)
      y_next[i] = x_cur[i] + factor * (x_cur[i] - x_prev[i]);
    StepResult st = oracle_step(p, L, y_next, false, tr.oracle_calls);
    double savg = std::nan("");
    if (which == Reduced::FistaG && k < T - 1) {
      kern::axpy(w.a[k + 1], st.g.data(), s.data(), n);
      savg = metric.dual_norm(s) / (w.A[k + 1] - w.A[0]);
    }
    tr.rows.push_back({k + 1, tr.oracle_calls, phase, L, st.F_x,
                       metric.dual_norm(st.g), savg, clock.elapsed()});
    if (keep_vectors) {
      tr.y[k + 1] = y_next;
      tr.x[k + 1] = st.x;
      tr.g[k + 1] = st.g;
    }
    if (k == T - 1) {
      tr.y_T = y_next;
      tr.g_T = st.g;
      tr.x_T = std::move(st.x);
      tr.L_T = L;
      tr.F_out = st.F_x;
      break;
    }
    x_prev = std::move(x_cur);
    x_cur = std::move(st.x);
  }
  return tr;
}

RunTrace run_gm(const CompositeProblem& p, std::span<const double> x0,
                const GmOptions& opts) {
  const int n = p.dim();
  const Metric& metric = p.metric();
  Stopwatch clock(true);

  RunTrace tr;
  tr.method = "gm";
  tr.n = n;
  tr.L0 = opts.L0;
  tr.problem = p.name;
  tr.F_x0 = feasible_value(p, x0);
  tr.rows.push_back(
      {0, 0, "gm", opts.L0, tr.F_x0, std::nan(""), std::nan(""), 0.0});

  Vec x(x0.begin(), x0.end());
  double L = opts.L0;
  int k = 0;
  while (tr.oracle_calls < opts.max_oracle_calls) {
    double Lk = opts.gamma_d * L;
    StepResult st;
    for (int trial = 0;; ++trial) {
      st = oracle_step(p, Lk, x, true, tr.oracle_calls);
      tr.ls_events.push_back({"gm", k + 1, Lk, st.margin >= 0.0});
      if (st.margin >= 0.0) break;
      if (trial > 200) throw std::runtime_error("gm: line search stalled");
      Lk *= opts.gamma_u;
    }
    L = Lk;
    ++k;
    double gn = metric.dual_norm(st.g);
    tr.rows.push_back({k, tr.oracle_calls, "gm", L, st.F_x, gn, std::nan(""),
                       clock.elapsed()});
    x = std::move(st.x);
    tr.x_T = x;
    tr.g_T = st.g;
    tr.L_T = L;
    tr.F_out = st.F_x;
    if (opts.eps > 0.0 && gn <= opts.eps) break;
  }
  tr.T = k;
  return tr;
}

}  // namespace gnm::engines
