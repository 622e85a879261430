// Command-line front end: problem generation, method execution, runtime
// certificate verification, constant tables and benchmark comparisons.
//
// Exit codes: 0 success, 2 usage error, 3 certificate failure,
// 4 line-search failure verdict, 5 I/O failure.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnm/acgm.hpp"
#include "gnm/certificates.hpp"
#include "gnm/engines.hpp"
#include "gnm/generators.hpp"
#include "gnm/kernels.hpp"
#include "gnm/meta.hpp"
#include "gnm/problem_io.hpp"
#include "gnm/schedules.hpp"
#include "gnm/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gnm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCertificate = 3;
constexpr int kExitLineSearch = 4;
constexpr int kExitIo = 5;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("GNM_OUT_DIR")) return env;
  return ".";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  int m = 500, n = 500;
  double lambda1 = 4.0;
  double density = 0.1;
  double mu = 0.01, L = 1.0;
  std::uint64_t seed = 1;
  std::string out;
  std::string out_dir;
};

int cmd_gen(const GenArgs& a) {
  std::string prefix = a.out;
  if (prefix.empty())
    prefix = (fs::path(default_out_dir(a.out_dir)) / a.kind).string();
  if (a.kind == "lasso") {
    io::save_problem(make_lasso(a.m, a.n, a.lambda1, a.seed), prefix);
  } else if (a.kind == "nnls") {
    io::save_problem(make_nnls(a.m, a.n, a.density, a.seed), prefix);
  } else if (a.kind == "quadratic") {
    io::save_problem(make_quadratic(a.n, a.mu, a.L, a.seed), prefix);
  } else {
    std::cerr << "gen: unknown kind " << a.kind << "\n";
    return kExitUsage;
  }
  std::cout << prefix << ".json\n";
  return kExitOk;
}

// ---- run ------------------------------------------------------------------

struct RunArgs {
  std::string problem;
  std::string method = "ocgmg";
  std::string form = "canonical";
  int T = 0;
  long long budget = 50000;
  double eps_rel = 1e-8;
  double L0 = 0.0;  // 0: use the recorded constant, else 1
  double gamma_d = 0.9;
  double gamma_u = 2.0;
  double sigma = 0.1353352832366127;
  double s_mult = 4.0;
  std::string trace_path;
  std::string out_dir;
  bool timings = false;
};

int cmd_run(const RunArgs& a) {
  auto loaded = io::load_problem(a.problem);
  const CompositeProblem& p = *loaded.problem;
  Vec start = loaded.start;
  if (!p.value(start)) {
    Vec proj;
    p.prox(1.0, start, proj);
    start = std::move(proj);
  }
  const double L_known = p.lipschitz.value_or(0.0);
  const double L0 = a.L0 > 0.0 ? a.L0 : (L_known > 0.0 ? L_known : 1.0);

  // Mapping-norm target relative to the first mapping at the recorded (or
  // supplied) constant.
  Vec g1 = gradient_mapping(p, L_known > 0.0 ? L_known : L0, start);
  const double eps = a.eps_rel * p.metric().dual_norm(g1);

  const std::string trace_path =
      a.trace_path.empty()
          ? (fs::path(default_out_dir(a.out_dir)) / ("trace_" + a.method + ".csv"))
                .string()
          : a.trace_path;

  RunTrace trace;
  int code = kExitOk;
  if (a.method == "ogmg" || a.method == "ocgmg") {
    if (a.T < 2) {
      std::cerr << "run: --T >= 2 required for " << a.method << "\n";
      return kExitUsage;
    }
    engines::RunOptions o;
    o.form = engines::form_from_string(a.form);
    o.record_timings = a.timings;
    trace = a.method == "ogmg" ? engines::run_ogmg(p, start, L0, a.T, o)
                               : engines::run_ocgmg(p, start, L0, a.T, o);
    if (trace.linesearch_failure) code = kExitLineSearch;
  } else if (a.method == "fista" || a.method == "fistag") {
    if (a.T < 2) {
      std::cerr << "run: --T >= 2 required for " << a.method << "\n";
      return kExitUsage;
    }
    trace = engines::run_reduced(
        p, start, L0, a.T,
        a.method == "fista" ? engines::Reduced::Fista : engines::Reduced::FistaG,
        false, a.timings);
  } else if (a.method == "gm") {
    engines::GmOptions o;
    o.L0 = L0;
    o.gamma_d = a.gamma_d;
    o.gamma_u = a.gamma_u;
    o.max_oracle_calls = a.budget;
    o.eps = eps;
    o.record_timings = a.timings;
    trace = engines::run_gm(p, start, o);
  } else if (a.method == "acgm") {
    engines::AcgmStop stop;
    stop.oracle_budget = a.budget;
    stop.predicate = [eps](const engines::AcgmSolver& s) {
      return s.last_gmap_norm() <= eps;
    };
    auto res = engines::run_acgm(p, start, L0, a.gamma_d, a.gamma_u, stop,
                                 true, a.timings);
    trace = std::move(res.trace);
  } else if (a.method == "racgm") {
    engines::RacgmOptions o;
    o.sigma = a.sigma;
    o.s_mult = a.s_mult;
    o.L0 = L0;
    o.gamma_d = a.gamma_d;
    o.gamma_u = a.gamma_u;
    o.oracle_budget = a.budget;
    o.record_timings = a.timings;
    auto res = engines::run_racgm(p, start, o);
    trace = std::move(res.trace);
  } else if (a.method == "meta" || a.method == "meta-resume") {
    engines::MetaOptions o;
    o.L0 = L0;
    o.gamma_d = a.gamma_d;
    o.gamma_u = a.gamma_u;
    o.eps = eps;
    o.oracle_budget = a.budget;
    o.resume = a.method == "meta-resume";
    o.record_timings = a.timings;
    auto res = engines::run_meta(p, start, o);
    trace = std::move(res.trace);
  } else {
    std::cerr << "run: unknown method " << a.method << "\n";
    return kExitUsage;
  }

  trace.problem = loaded.kind;
  auto out = open_out(trace_path);
  trace.write_csv(out, a.timings);
  std::cout << trace_path << "\n";
  return code;
}

// ---- verify ---------------------------------------------------------------

struct VerifyArgs {
  std::string trace_path;
  std::string family;  // defaults to the trace's method
  int T = 0;
  double L0 = 0.0;
  double A_last = 1.0;
  std::string report_path;
  std::string out_dir;
};

int cmd_verify(const VerifyArgs& a) {
  std::ifstream in(a.trace_path);
  if (!in) throw IoError("cannot read " + a.trace_path);
  RunTrace trace = RunTrace::read_csv(in);

  std::string family = a.family.empty() ? trace.method : a.family;
  if (family == "fistag") family = "ocgmg";
  const int T = a.T > 0 ? a.T : trace.T;
  const double L0 = a.L0 > 0.0 ? a.L0 : trace.L0;

  schedules::Schedule sched;
  if (family == "ogmg")
    sched = schedules::ogmg_schedule(T, L0, a.A_last);
  else if (family == "ocgmg")
    sched = schedules::ocgmg_schedule(T, L0, a.A_last);
  else {
    std::cerr << "verify: no certificates defined for method " << family
              << "\n";
    return kExitUsage;
  }

  auto rep = analysis::midway_certificates(trace, sched);
  auto fin = analysis::final_certificate(trace, sched);
  rep.checks.insert(rep.checks.end(), fin.checks.begin(), fin.checks.end());

  json out;
  out["trace"] = a.trace_path;
  out["family"] = family;
  out["T"] = T;
  out["L0"] = L0;
  out["linesearch_failure"] = trace.linesearch_failure;
  out["all_pass"] = rep.all_pass();
  out["failures"] = rep.failures();
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"check", c.name},
                      {"slack", c.slack},
                      {"scale", c.scale},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"asserted", c.asserted}});
  out["checks"] = std::move(checks);

  std::string report_path = a.report_path;
  if (report_path.empty())
    report_path =
        (fs::path(default_out_dir(a.out_dir)) / "verify_report.json").string();
  open_out(report_path) << out.dump(2) << "\n";
  std::cout << report_path << "\n";
  if (!rep.all_pass()) {
    for (const auto& c : rep.checks)
      if (c.asserted && !c.pass)
        std::cerr << "verify: FAILED " << c.name << " slack=" << c.slack
                  << "\n";
    return kExitCertificate;
  }
  return kExitOk;
}

// ---- table ----------------------------------------------------------------

struct TableArgs {
  std::string which = "rate-constants";
  int T = 64;
  std::string out;
  std::string out_dir;
};

int cmd_table(const TableArgs& a) {
  std::string path = a.out;
  if (path.empty())
    path = (fs::path(default_out_dir(a.out_dir)) / ("table_" + a.which + ".csv"))
               .string();
  auto out = open_out(path);
  if (a.which == "theta") {
    auto th = schedules::theta_table(a.T);
    out << "k,theta\n";
    for (int k = 0; k <= a.T; ++k)
      out << k << ',' << format_double(th[k]) << "\n";
  } else if (a.which == "t") {
    auto to = schedules::t_sequence(a.T, schedules::TFamily::OcgmG);
    auto tf = schedules::t_sequence(a.T, schedules::TFamily::Fgm);
    out << "k,t_reverse,t_forward\n";
    for (int k = 0; k <= a.T; ++k)
      out << k << ',' << format_double(to[k]) << ',' << format_double(tf[k])
          << "\n";
  } else if (a.which == "rate-constants") {
    out << "l,G,T_shift\n";
    for (int l : {1, 2, 5, 10, 100, 1000, 10000, 100000}) {
      auto rc = schedules::rate_constants(l);
      out << l << ',' << format_double(rc.G) << ','
          << format_double(rc.T_shift) << "\n";
    }
  } else if (a.which == "unified-sweep") {
    std::vector<double> per_T;
    double worst = schedules::unified_rate_sweep(999, &per_T);
    out << "T,factor_times_T4sq\n";
    for (int T = 2; T <= 999; ++T)
      out << T << ',' << format_double(per_T[T]) << "\n";
    std::cout << "max over T in 2..999: " << format_double(worst) << "\n";
  } else {
    std::cerr << "table: unknown table " << a.which << "\n";
    return kExitUsage;
  }
  std::cout << path << "\n";
  return kExitOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchArgs {
  std::string suite;                  // JSON config
  std::vector<std::string> problems;  // manifests (alternative to suite)
  std::vector<std::string> methods = {"acgm", "meta-fista", "meta"};
  long long budget = 50000;
  double eps_rel = 1e-8;
  std::string out_dir;
  bool timings = false;
};

struct DecayCurve {
  // oracle calls needed to first bring |g|/|g_1| (resp. the normalized
  // residual) under each decade 1e-1..1e-8; -1 when never reached.
  std::vector<long long> gmap_calls = std::vector<long long>(8, -1);
  std::vector<long long> resid_calls = std::vector<long long>(8, -1);
  double final_F = 0.0;
  double min_F = 0.0;
  long long calls = 0;
};

RunTrace bench_run(const CompositeProblem& p, const Vec& start,
                   const std::string& method, double L0, double eps,
                   long long budget, bool timings) {
  if (method == "acgm") {
    engines::AcgmStop stop;
    stop.oracle_budget = budget;
    stop.predicate = [eps](const engines::AcgmSolver& s) {
      return s.last_gmap_norm() <= eps;
    };
    return engines::run_acgm(p, start, L0, 0.9, 2.0, stop, true, timings)
        .trace;
  }
  engines::MetaOptions o;
  o.L0 = L0;
  o.eps = eps;
  o.oracle_budget = budget;
  o.reduced = method == "meta-fista";
  o.resume = method == "meta-resume";
  o.record_timings = timings;
  return engines::run_meta(p, start, o).trace;
}

int cmd_bench(const BenchArgs& args_in) {
  BenchArgs a = args_in;
  if (!a.suite.empty()) {
    std::ifstream in(a.suite);
    if (!in) throw IoError("cannot read " + a.suite);
    json cfg;
    in >> cfg;
    if (cfg.contains("problems"))
      a.problems = cfg["problems"].get<std::vector<std::string>>();
    if (cfg.contains("methods"))
      a.methods = cfg["methods"].get<std::vector<std::string>>();
    if (cfg.contains("budget")) a.budget = cfg["budget"].get<long long>();
    if (cfg.contains("eps_rel")) a.eps_rel = cfg["eps_rel"].get<double>();
  }
  if (a.problems.empty()) {
    std::cerr << "bench: no problems given\n";
    return kExitUsage;
  }
  const std::string dir = default_out_dir(a.out_dir);
  fs::create_directories(dir);

  json report;
  report["budget"] = a.budget;
  report["eps_rel"] = a.eps_rel;
  report["kernels"] = kern::active_name();
  json problems = json::array();

  for (const auto& manifest : a.problems) {
    auto loaded = io::load_problem(manifest);
    const CompositeProblem& p = *loaded.problem;
    Vec start = loaded.start;
    const double L0 = p.lipschitz.value_or(1.0);
    Vec g1v = gradient_mapping(p, L0, start);
    const double g1 = p.metric().dual_norm(g1v);
    const double eps = a.eps_rel * g1;
    const double F0 = *p.value(start);

    std::map<std::string, RunTrace> traces;
    double F_best = F0;
    for (const auto& method : a.methods) {
      RunTrace tr = bench_run(p, start, method, L0, eps, a.budget, a.timings);
      for (const auto& row : tr.rows)
        if (row.k > 0) F_best = std::min(F_best, row.F_x);
      traces.emplace(method, std::move(tr));
    }

    json jmethods = json::object();
    for (const auto& [method, tr] : traces) {
      DecayCurve c;
      c.calls = tr.oracle_calls;
      c.final_F = tr.F_out;
      c.min_F = F0;
      for (const auto& row : tr.rows) {
        if (row.k == 0) continue;
        c.min_F = std::min(c.min_F, row.F_x);
        for (int d = 0; d < 8; ++d) {
          double thr = std::pow(10.0, -(d + 1));
          if (c.gmap_calls[d] < 0 && row.gmap_norm <= thr * g1)
            c.gmap_calls[d] = row.oracle_calls;
          if (c.resid_calls[d] < 0 && F0 > F_best &&
              row.F_x - F_best <= thr * (F0 - F_best))
            c.resid_calls[d] = row.oracle_calls;
        }
      }
      const std::string trace_path =
          (fs::path(dir) / ("bench_" + loaded.kind + "_" + method + ".csv"))
              .string();
      open_out(trace_path) << [&] {
        std::ostringstream ss;
        tr.write_csv(ss, a.timings);
        return ss.str();
      }();
      jmethods[method] = {{"trace", trace_path},
                          {"oracle_calls", c.calls},
                          {"final_F", c.final_F},
                          {"min_F", c.min_F},
                          {"gmap_decade_calls", c.gmap_calls},
                          {"resid_decade_calls", c.resid_calls}};
    }

    // Deepest mapping decade every method reached; the method that got
    // there with the fewest oracle calls leads the high-accuracy regime.
    int deepest = -1;
    for (int d = 7; d >= 0; --d) {
      bool all = true;
      for (const auto& [method, tr] : traces)
        if (jmethods[method]["gmap_decade_calls"][d].get<long long>() < 0)
          all = false;
      if (all) {
        deepest = d;
        break;
      }
    }
    std::string leader = "none";
    if (deepest >= 0) {
      long long best = -1;
      for (const auto& [method, tr] : traces) {
        long long calls =
            jmethods[method]["gmap_decade_calls"][deepest].get<long long>();
        if (best < 0 || calls < best) {
          best = calls;
          leader = method;
        }
      }
    }
    problems.push_back({{"manifest", manifest},
                        {"kind", loaded.kind},
                        {"g1", g1},
                        {"F0", F0},
                        {"F_best", F_best},
                        {"deepest_common_gmap_decade", deepest + 1},
                        {"high_accuracy_leader", leader},
                        {"methods", std::move(jmethods)}});
  }
  report["problems"] = std::move(problems);

  const std::string report_path = (fs::path(dir) / "bench_report.json").string();
  open_out(report_path) << report.dump(2) << "\n";
  std::cout << report_path << "\n";
  return kExitOk;
}

// ---- config file ----------------------------------------------------------

// --config FILE supplies defaults as a flat JSON object keyed by long
// option names; explicit command-line flags win.
std::vector<std::string> inject_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string cfg_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      cfg_path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      cfg_path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (cfg_path.empty()) return args;
  std::ifstream in(cfg_path);
  if (!in) throw IoError("cannot read " + cfg_path);
  json cfg;
  in >> cfg;
  std::vector<std::string> merged;
  if (!args.empty()) merged.push_back(args[0]);  // subcommand first
  for (auto it = cfg.begin(); it != cfg.end(); ++it) {
    std::string v;
    if (it->is_string()) v = it->get<std::string>();
    else v = it->dump();
    merged.push_back("--" + it.key() + "=" + v);
  }
  merged.insert(merged.end(), args.begin() + (args.empty() ? 0 : 1),
                args.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first-order gradient-mapping-norm toolkit"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  GenArgs gen;
  auto* cgen = app.add_subcommand("gen", "generate a problem instance");
  cgen->add_option("--kind", gen.kind, "lasso | nnls | quadratic")
      ->required();
  cgen->add_option("--m", gen.m);
  cgen->add_option("--n", gen.n);
  cgen->add_option("--lambda", gen.lambda1);
  cgen->add_option("--density", gen.density);
  cgen->add_option("--mu", gen.mu);
  cgen->add_option("--L", gen.L);
  cgen->add_option("--seed", gen.seed);
  cgen->add_option("--out", gen.out, "output prefix");
  cgen->add_option("--out-dir", gen.out_dir);

  RunArgs run;
  auto* crun = app.add_subcommand("run", "run a method and write a trace");
  crun->add_option("--problem", run.problem)->required();
  crun->add_option("--method", run.method,
                   "gm|acgm|racgm|ogmg|ocgmg|fista|fistag|meta|meta-resume");
  crun->add_option("--form", run.form,
                   "canonical|extrapolated|one-aux|two-aux");
  crun->add_option("--T", run.T);
  crun->add_option("--budget", run.budget, "oracle-call budget");
  crun->add_option("--eps-rel", run.eps_rel);
  crun->add_option("--L0", run.L0);
  crun->add_option("--gamma-d", run.gamma_d);
  crun->add_option("--gamma-u", run.gamma_u);
  crun->add_option("--sigma", run.sigma);
  crun->add_option("--s-mult", run.s_mult);
  crun->add_option("--trace", run.trace_path);
  crun->add_option("--out-dir", run.out_dir);
  crun->add_flag("--timings", run.timings,
                 "record wall time in the trace (breaks byte determinism)");

  VerifyArgs verify;
  auto* cverify =
      app.add_subcommand("verify", "evaluate runtime certificates on a trace");
  cverify->add_option("--trace", verify.trace_path)->required();
  cverify->add_option("--family", verify.family, "ogmg | ocgmg");
  cverify->add_option("--T", verify.T);
  cverify->add_option("--L0", verify.L0);
  cverify->add_option("--A-last", verify.A_last);
  cverify->add_option("--report", verify.report_path);
  cverify->add_option("--out-dir", verify.out_dir);

  TableArgs table;
  auto* ctable = app.add_subcommand("table", "emit schedule/constant tables");
  ctable->add_option("--which", table.which,
                     "theta | t | rate-constants | unified-sweep");
  ctable->add_option("--T", table.T);
  ctable->add_option("--out", table.out);
  ctable->add_option("--out-dir", table.out_dir);

  BenchArgs bench;
  auto* cbench = app.add_subcommand("bench", "compare methods on a suite");
  cbench->add_option("--suite", bench.suite, "suite config JSON");
  cbench->add_option("--problem", bench.problems, "problem manifest(s)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cbench->add_option("--method", bench.methods, "methods to compare")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cbench->add_option("--budget", bench.budget);
  cbench->add_option("--eps-rel", bench.eps_rel);
  cbench->add_option("--out-dir", bench.out_dir);
  cbench->add_flag("--timings", bench.timings);

  try {
    auto args = inject_config(argc, argv);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& s : args) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    if (cgen->parsed()) return cmd_gen(gen);
    if (crun->parsed()) return cmd_run(run);
    if (cverify->parsed()) return cmd_verify(verify);
    if (ctable->parsed()) return cmd_table(table);
    if (cbench->parsed()) return cmd_bench(bench);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
