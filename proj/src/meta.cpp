#include "gnm/meta.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace gnm::engines {

MetaResult run_meta(const CompositeProblem& p, std::span<const double> x0,
                    const MetaOptions& opts) {
  if (!opts.eps && !opts.oracle_budget)
    throw std::invalid_argument("meta: need a stop criterion");
  if (!(opts.L0 > 0.0)) throw std::invalid_argument("meta: L0 must be > 0");

  MetaResult res;
  res.trace.method = opts.reduced ? "meta-fista" : "meta";
  res.trace.n = p.dim();
  res.trace.L0 = opts.L0;
  res.trace.problem = p.name;
  auto F0 = p.value(x0);
  if (!F0) throw std::invalid_argument("meta: infeasible starting point");
  res.trace.F_x0 = *F0;

  Vec r(x0.begin(), x0.end());
  double F_r = *F0;
  double L_max = opts.L0;
  double L_bar = opts.L0;
  long long calls = 0;
  int T = 2;

  auto out_of_budget = [&]() {
    return opts.oracle_budget && calls >= *opts.oracle_budget;
  };

  // Persistent solver for the resume variant: one continuous run with
  // mapping instances branching off at doubling counters.
  std::unique_ptr<AcgmSolver> resumed;
  if (opts.resume && !opts.reduced) {
    resumed = std::make_unique<AcgmSolver>(p, x0, opts.L0, opts.gamma_d,
                                           opts.gamma_u);
    resumed->trace = &res.trace;
    resumed->record_timings = opts.record_timings;
  }

  const std::string residual_phase = opts.reduced ? "fista" : "acgm";
  const std::string mapping_phase = opts.reduced ? "fistag" : "ocgmg";

  for (int j = 0;; ++j) {
    MetaCycle cyc;
    cyc.j = j;
    cyc.T = T;
    cyc.F_in = F_r;

    // Residual-reduction half.
    Vec r_mid;
    double F_mid;
    if (opts.reduced) {
      RunTrace ft = run_reduced(p, r, opts.L0, T, Reduced::Fista, false,
                                opts.record_timings);
      r_mid = ft.x_T;
      F_mid = ft.F_out;
      res.trace.absorb(ft, residual_phase + ":" + std::to_string(j), calls);
      calls += ft.oracle_calls;
    } else if (opts.resume) {
      resumed->phase = residual_phase + ":" + std::to_string(j);
      resumed->call_offset = calls - resumed->oracle_calls();
      int target = T;  // the continuous internal counter reaches T_j
      while (resumed->iterations() < target && !out_of_budget()) {
        resumed->step();
        calls = resumed->call_offset + resumed->oracle_calls();
      }
      r_mid = resumed->x();
      F_mid = resumed->F_x();
      L_max = std::max(L_max, resumed->max_L());
      L_bar = resumed->last_L();
    } else {
      AcgmStop stop;
      stop.max_iterations = T;
      if (opts.oracle_budget) stop.oracle_budget = *opts.oracle_budget - calls;
      AcgmResult ar = run_acgm(p, r, L_bar, opts.gamma_d, opts.gamma_u, stop,
                               true, opts.record_timings);
      res.trace.absorb(ar.trace, residual_phase + ":" + std::to_string(j),
                       calls);
      calls += ar.oracle_calls;
      r_mid = ar.r;
      F_mid = ar.F_r;
      L_max = std::max(L_max, ar.max_L);
      L_bar = ar.last_L;
    }
    cyc.F_mid = F_mid;
    cyc.instance_F.push_back(F_mid);
    if (out_of_budget()) {
      res.cycles.push_back(cyc);
      break;
    }

    // Mapping-certification half: repeat until the estimate survives
    // every iteration.
    Vec r_in = r_mid;
    bool certified = false;
    Vec g_out;
    Vec x_out;
    double F_out_val = F_mid;
    while (true) {
      RunTrace ot;
      if (opts.reduced) {
        ot = run_reduced(p, r_in, opts.L0, T, Reduced::FistaG, false,
                         opts.record_timings);
        ot.linesearch_failure = false;
      } else {
        RunOptions ro;
        ro.record_timings = opts.record_timings;
        ot = run_ocgmg(p, r_in, L_max, T, ro);
      }
      res.trace.absorb(ot,
                       mapping_phase + ":" + std::to_string(j) + ":" +
                           std::to_string(cyc.failures),
                       calls);
      calls += ot.oracle_calls;
      cyc.instance_F.push_back(ot.F_out);
      if (!ot.linesearch_failure) {
        certified = true;
        g_out = ot.g_T;
        x_out = ot.x_T;
        F_out_val = ot.F_out;
        break;
      }
      ++cyc.failures;
      ++res.total_failures;
      L_max *= opts.gamma_u;
      if (!opts.resume) r_in = ot.x_T;  // chain outputs forward
      if (out_of_budget()) break;
    }

    if (certified) {
      if (!opts.resume) {
        r = std::move(x_out);
        F_r = F_out_val;
      } else {
        r = resumed->x();
        F_r = resumed->F_x();
      }
      res.r = r;
      res.g_certified = g_out;
      res.gnorm_certified = p.metric().dual_norm(g_out);
      res.have_certificate = true;
      cyc.F_out = opts.resume ? F_out_val : F_r;
      cyc.certified_gnorm = res.gnorm_certified;
      cyc.L_max = L_max;
      cyc.oracle_calls_at_end = calls;
      res.cycles.push_back(cyc);
      if (opts.eps && res.gnorm_certified <= *opts.eps) {
        res.reached_eps = true;
        break;
      }
    } else {
      res.cycles.push_back(cyc);
    }
    if (out_of_budget()) break;
    T *= 2;
  }

  res.oracle_calls = calls;
  res.trace.oracle_calls = calls;
  res.trace.T = static_cast<int>(res.cycles.size());
  if (res.have_certificate) {
    res.trace.x_T = res.r;
    res.trace.g_T = res.g_certified;
  }
  res.trace.F_out = F_r;
  return res;
}

}  // namespace gnm::engines
