#pragma once

#include <functional>
#include <limits>
#include <span>

#include "gnm/problem.hpp"
#include "gnm/trace.hpp"

namespace gnm::engines {

// Accelerated composite gradient method with a fully adaptive backtracking
// search over the Lipschitz estimate. Kept as a stateful object so the
// meta-scheme can resume an instance across cycles.
class AcgmSolver {
 public:
  AcgmSolver(const CompositeProblem& p, std::span<const double> x0, double L0,
             double gamma_d, double gamma_u);

  // One accepted iteration (possibly several line-search trials).
  void step();

  int iterations() const { return k_; }
  double A() const { return A_; }
  double last_L() const { return L_; }
  double max_L() const { return max_L_; }
  long long oracle_calls() const { return oracle_calls_; }
  // |g_{L_k}(y_k)|_* of the last accepted iteration.
  double last_gmap_norm() const { return last_gmap_; }

  const Vec& x() const { return x_; }
  double F_x() const { return F_x_; }
  const Vec& x1() const { return x1_; }
  double F_x1() const { return F_x1_; }
  double F_x0() const { return F_x0_; }

  // argmin{F(x_k), F(x_1)}, ties resolved toward the latest iterate.
  const Vec& best() const { return F_x_ <= F_x1_ ? x_ : x1_; }
  double F_best() const { return F_x_ <= F_x1_ ? F_x_ : F_x1_; }

  // F(x_i) for i = 0..k; drives the restart heuristics.
  const std::vector<double>& value_history() const { return F_hist_; }

  RunTrace* trace = nullptr;  // optional row sink
  std::string phase = "acgm";
  long long call_offset = 0;  // added to the oracle column in trace rows
  bool record_timings = false;

 private:
  const CompositeProblem& p_;
  double gamma_d_, gamma_u_;
  Vec x_, v_;
  Vec x1_;
  double F_x0_, F_x_, F_x1_ = std::numeric_limits<double>::infinity();
  double A_ = 0.0, L_, max_L_;
  double last_gmap_ = std::numeric_limits<double>::infinity();
  int k_ = 0;
  long long oracle_calls_ = 0;
  std::vector<double> F_hist_;
};

struct AcgmResult {
  Vec r;  // argmin{F(x_k), F(x_1)}
  double F_r = 0.0;
  double A = 0.0;
  int iterations = 0;
  double max_L = 0.0;
  double last_L = 0.0;
  long long oracle_calls = 0;
  bool stopped_by_predicate = false;
  RunTrace trace;
};

struct AcgmStop {
  double A_threshold = std::numeric_limits<double>::infinity();
  long long max_iterations = std::numeric_limits<long long>::max();
  long long oracle_budget = std::numeric_limits<long long>::max();
  // Evaluated after each iteration; receives the solver itself.
  std::function<bool(const AcgmSolver&)> predicate;
};

AcgmResult run_acgm(const CompositeProblem& p, std::span<const double> x0,
                    double L0, double gamma_d, double gamma_u,
                    const AcgmStop& stop, bool keep_trace = true,
                    bool record_timings = false);

struct RacgmOptions {
  double sigma = 0.1353352832366127;  // exp(-2)
  double s_mult = 4.0;
  double L0 = 1.0;
  double gamma_d = 0.9;
  double gamma_u = 2.0;
  long long oracle_budget = 100000;
  long long e0_iteration_cap = 1000000;  // guards a nonterminating heuristic
  bool record_timings = false;
};

struct RacgmResult {
  Vec best;
  double F_best = 0.0;
  std::vector<double> F_restarts;      // F(r_j), j = 0,1,...
  std::vector<double> gnorm_restarts;  // |g(r_j)|_* at the restart points
  std::vector<int> inner_iterations;   // n_j
  std::vector<double> thresholds;      // Ubar_j
  int adjustments = 0;                 // b
  bool budget_exhausted = false;
  long long oracle_calls = 0;
  RunTrace trace;
};

// Parameter-free restart wrapper; the first call runs under the reference
// heuristic, later calls until the accumulator threshold is met, with the
// threshold multiplied by s_mult whenever progress stalls.
RacgmResult run_racgm(const CompositeProblem& p, std::span<const double> r0,
                      const RacgmOptions& opts);

}  // namespace gnm::engines
