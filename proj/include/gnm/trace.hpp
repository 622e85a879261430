#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gnm/space.hpp"

namespace gnm {

// One row per oracle iteration. k = 0 rows carry the input state of a
// phase (F at the starting point); mapping norms are NaN there.
struct TraceRow {
  int k = 0;
  long long oracle_calls = 0;
  std::string phase;
  double L = 0.0;
  double F_x = 0.0;
  double gmap_norm = 0.0;  // |g_k|_*
  double savg_norm = 0.0;  // |sbar_k|_* = |s_k|_* / (A_k - A_0)
  double wall_s = 0.0;
};

struct LineSearchEvent {
  std::string phase;
  int k = 0;
  double L = 0.0;
  bool accepted = false;
};

struct RunTrace {
  std::string method;
  std::string form;
  int T = 0;
  int n = 0;
  double L0 = 0.0;
  double A_last = 1.0;
  std::string problem;

  std::vector<TraceRow> rows;
  long long oracle_calls = 0;
  bool linesearch_failure = false;
  int failure_k = -1;
  std::vector<LineSearchEvent> ls_events;

  // Optional full snapshots for in-memory certificate checks:
  // x[0..T] (x[0] = start), y/g[1..T], s/v[0..T-1].
  bool has_vectors = false;
  std::vector<Vec> y, x, g, s, v;

  // Run outputs.
  Vec y_T, g_T, x_T;
  double L_T = 0.0;
  double F_x0 = 0.0;
  double F_out = 0.0;

  // Appends rows of `other` shifting iteration counters by `call_offset`
  // and relabeling the phase; used by the meta-scheme.
  void absorb(const RunTrace& other, const std::string& phase,
              long long call_offset);

  void write_csv(std::ostream& out, bool with_timings = false) const;
  // Scalar rows + metadata only; vector snapshots are not serialized.
  static RunTrace read_csv(std::istream& in);
};

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace gnm
