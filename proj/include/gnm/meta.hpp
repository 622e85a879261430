#pragma once

#include <optional>
#include <span>

#include "gnm/acgm.hpp"
#include "gnm/engines.hpp"

namespace gnm::engines {

// Quasi-online alternation: each cycle j runs ACGM for T_j = 2^{j+1}
// iterations (residual reduction), then OCGM-G instances of the same
// length until one passes every estimate check (mapping certification),
// with the shared estimate L_max raised multiplicatively after each failed
// instance. The certified mapping of the last completed cycle is the
// output. Inner lengths double between cycles.
struct MetaOptions {
  double L0 = 1.0;
  double gamma_d = 0.9;
  double gamma_u = 2.0;
  // Stop on whichever fires first; at least one must be set.
  std::optional<double> eps;               // certified |g|_* target
  std::optional<long long> oracle_budget;  // gradient+prox pairs
  bool resume = false;   // continuous ACGM, mapping progress discarded
  bool reduced = false;  // fixed-L two-point inner engines (L0 must be valid)
  bool record_timings = false;
};

struct MetaCycle {
  int j = 0;
  int T = 0;
  double F_in = 0.0;         // F(r_j)
  double F_mid = 0.0;        // F after the residual-reduction half
  double F_out = 0.0;        // F(r_{j+1})
  int failures = 0;          // failed mapping instances this cycle
  double certified_gnorm = 0.0;
  double L_max = 0.0;
  long long oracle_calls_at_end = 0;
  std::vector<double> instance_F;  // F chain across mapping instances
};

struct MetaResult {
  Vec r;                  // point carried by the last completed cycle
  Vec g_certified;        // its certified gradient mapping
  double gnorm_certified = 0.0;
  bool have_certificate = false;
  bool reached_eps = false;
  int total_failures = 0;
  long long oracle_calls = 0;
  std::vector<MetaCycle> cycles;
  RunTrace trace;
};

MetaResult run_meta(const CompositeProblem& p, std::span<const double> x0,
                    const MetaOptions& opts);

}  // namespace gnm::engines
