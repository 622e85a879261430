#include "gnm/trace.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace gnm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan" || s.empty()) return std::nan("");
  return std::strtod(s.c_str(), nullptr);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

}  // namespace

void RunTrace::absorb(const RunTrace& other, const std::string& phase,
                      long long call_offset) {
  for (TraceRow row : other.rows) {
    row.phase = phase;
    row.oracle_calls += call_offset;
    rows.push_back(std::move(row));
  }
  for (LineSearchEvent ev : other.ls_events) {
    ev.phase = phase;
    ls_events.push_back(std::move(ev));
  }
}

void RunTrace::write_csv(std::ostream& out, bool with_timings) const {
  out << "# gnm-trace v1 method=" << method;
  if (!form.empty()) out << " form=" << form;
  out << " T=" << T << " n=" << n << " L0=" << format_double(L0)
      << " A_last=" << format_double(A_last);
  if (!problem.empty()) out << " problem=" << problem;
  out << " failure=" << (linesearch_failure ? 1 : 0) << "\n";
  out << "k,oracle_calls,phase,L_k,F_x,gmap_dualnorm,savg_dualnorm,wall_s\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.oracle_calls << ',' << r.phase << ','
        << format_double(r.L) << ',' << format_double(r.F_x) << ','
        << format_double(r.gmap_norm) << ',' << format_double(r.savg_norm)
        << ',' << format_double(with_timings ? r.wall_s : 0.0) << "\n";
  }
}

RunTrace RunTrace::read_csv(std::istream& in) {
  RunTrace t;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# gnm-trace", 0) != 0)
    throw std::runtime_error("trace: missing gnm-trace header");
  {
    std::istringstream hs(line.substr(2));
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "method") t.method = val;
      else if (key == "form") t.form = val;
      else if (key == "T") t.T = std::atoi(val.c_str());
      else if (key == "n") t.n = std::atoi(val.c_str());
      else if (key == "L0") t.L0 = parse_double(val);
      else if (key == "A_last") t.A_last = parse_double(val);
      else if (key == "problem") t.problem = val;
      else if (key == "failure") t.linesearch_failure = val == "1";
    }
  }
  if (!std::getline(in, line) || line.rfind("k,oracle_calls", 0) != 0)
    throw std::runtime_error("trace: missing column header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split(line, ',');
    if (f.size() != 8) throw std::runtime_error("trace: malformed row");
    TraceRow r;
    r.k = std::atoi(f[0].c_str());
    r.oracle_calls = std::atoll(f[1].c_str());
    r.phase = f[2];
    r.L = parse_double(f[3]);
    r.F_x = parse_double(f[4]);
    r.gmap_norm = parse_double(f[5]);
    r.savg_norm = parse_double(f[6]);
    r.wall_s = parse_double(f[7]);
    t.rows.push_back(std::move(r));
  }
  if (t.rows.empty()) throw std::runtime_error("trace: no rows");
  t.oracle_calls = t.rows.back().oracle_calls;
  for (const auto& r : t.rows)
    if (r.k == 0 && r.oracle_calls == 0) t.F_x0 = r.F_x;
  return t;
}

}  // namespace gnm
