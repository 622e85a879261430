#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string binary() {
  if (const char* env = std::getenv("GNM_BIN")) return env;
  return "./tools/gnm";
}

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cmd(const fs::path& dir, const std::string& args) {
  fs::path out = dir / "stdout.txt";
  std::string cmd = "cd " + dir.string() + " && " + binary() + " " + args +
                    " > " + out.string() + " 2> " + (dir / "stderr.txt").string();
  int status = std::system(cmd.c_str());
  CmdResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gnm_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("gen, run, verify round trip") {
  TempDir tmp;
  auto g = run_cmd(tmp.path,
                   "gen --kind lasso --m 24 --n 20 --lambda 4 --seed 3 --out p");
  REQUIRE(g.code == 0);
  REQUIRE(fs::exists(tmp.path / "p.json"));
  REQUIRE(fs::exists(tmp.path / "p_A.mtx"));

  auto r = run_cmd(tmp.path,
                   "run --method ocgmg --T 64 --form extrapolated "
                   "--problem p.json --trace t.csv");
  REQUIRE(r.code == 0);

  // One header row, one input row, then exactly T mapping rows.
  std::ifstream in(tmp.path / "t.csv");
  std::string line;
  int mapping_rows = 0, total_rows = 0;
  std::getline(in, line);  // metadata
  std::getline(in, line);  // column header
  while (std::getline(in, line)) {
    ++total_rows;
    if (line.rfind("0,", 0) != 0) ++mapping_rows;
  }
  CHECK(mapping_rows == 64);
  CHECK(total_rows == 65);

  auto v = run_cmd(tmp.path, "verify --trace t.csv --report rep.json");
  CHECK(v.code == 0);
  json rep;
  std::ifstream repin(tmp.path / "rep.json");
  repin >> rep;
  CHECK(rep["all_pass"].get<bool>());
  CHECK(rep["checks"].size() > 64);
}

TEST_CASE("run is byte deterministic") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 30 --mu 0.01 --L 1 --seed 7 "
                  "--out q")
              .code == 0);
  REQUIRE(run_cmd(tmp.path,
                  "run --method meta --problem q.json --budget 800 "
                  "--eps-rel 1e-10 --trace a.csv")
              .code == 0);
  REQUIRE(run_cmd(tmp.path,
                  "run --method meta --problem q.json --budget 800 "
                  "--eps-rel 1e-10 --trace b.csv")
              .code == 0);
  CHECK(slurp(tmp.path / "a.csv") == slurp(tmp.path / "b.csv"));
  CHECK(slurp(tmp.path / "a.csv").find("acgm:0") != std::string::npos);
  CHECK(slurp(tmp.path / "a.csv").find("ocgmg:0:0") != std::string::npos);
}

TEST_CASE("every method runs on a small instance") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 10 --mu 0.05 --L 1 --seed 2 "
                  "--out q")
              .code == 0);
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind nnls --m 20 --n 30 --density 0.2 --seed 2 "
                  "--out s")
              .code == 0);
  for (std::string m : {"gm", "acgm", "racgm", "meta", "meta-resume"}) {
    auto r = run_cmd(tmp.path, "run --method " + m +
                                   " --problem q.json --budget 300 "
                                   "--eps-rel 1e-6 --trace " +
                                   m + ".csv");
    CHECK(r.code == 0);
  }
  for (std::string m : {"ogmg"}) {
    CHECK(run_cmd(tmp.path, "run --method " + m +
                                " --problem q.json --T 16 --trace o.csv")
              .code == 0);
  }
  for (std::string m : {"ocgmg", "fista", "fistag", "meta"}) {
    CHECK(run_cmd(tmp.path, "run --method " + m +
                                " --problem s.json --T 16 --budget 400 "
                                "--trace c_" +
                                m + ".csv")
              .code == 0);
  }
  // fistag traces carry the certificate data too.
  CHECK(run_cmd(tmp.path, "verify --trace c_fistag.csv").code == 0);
}

TEST_CASE("line-search failure verdict maps to exit code 4") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 8 --mu 0.1 --L 1 --seed 4 "
                  "--out q")
              .code == 0);
  auto r = run_cmd(tmp.path,
                   "run --method ocgmg --T 8 --L0 0.001 --problem q.json "
                   "--trace f.csv");
  CHECK(r.code == 4);
  CHECK(slurp(tmp.path / "f.csv").find("failure=1") != std::string::npos);
}

TEST_CASE("verify flags corrupted traces") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 12 --mu 0.05 --L 1 --seed 5 "
                  "--out q")
              .code == 0);
  REQUIRE(run_cmd(tmp.path,
                  "run --method ogmg --T 12 --problem q.json --trace t.csv")
              .code == 0);
  REQUIRE(run_cmd(tmp.path, "verify --trace t.csv").code == 0);

  // Lower the recorded starting value; the accumulator guarantees break.
  std::ifstream in(tmp.path / "t.csv");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  in.close();
  auto pos = content.find("\n0,0,");
  REQUIRE(pos != std::string::npos);
  auto comma = content.find(",", content.find("F", 0));
  (void)comma;
  // Replace the F column of the k=0 row with a smaller number.
  auto row_end = content.find('\n', pos + 1);
  std::string row = content.substr(pos + 1, row_end - pos - 1);
  std::vector<std::string> fields;
  std::stringstream rs(row);
  std::string f;
  while (std::getline(rs, f, ',')) fields.push_back(f);
  fields[4] = "0.0";
  std::string newrow;
  for (std::size_t i = 0; i < fields.size(); ++i)
    newrow += (i ? "," : "") + fields[i];
  content.replace(pos + 1, row_end - pos - 1, newrow);
  std::ofstream(tmp.path / "bad.csv") << content;

  auto v = run_cmd(tmp.path, "verify --trace bad.csv");
  CHECK(v.code == 3);

  std::ofstream(tmp.path / "empty.csv") << "";
  CHECK(run_cmd(tmp.path, "verify --trace empty.csv").code == 5);
}

TEST_CASE("tables") {
  TempDir tmp;
  CHECK(run_cmd(tmp.path, "table --which theta --T 16").code == 0);
  CHECK(run_cmd(tmp.path, "table --which t --T 16").code == 0);
  auto r = run_cmd(tmp.path, "table --which rate-constants");
  CHECK(r.code == 0);
  auto rows = slurp(tmp.path / "table_rate-constants.csv");
  CHECK(rows.find("75.712812") != std::string::npos);
  CHECK(rows.find("56.667333") != std::string::npos);

  auto sweep = run_cmd(tmp.path, "table --which unified-sweep");
  CHECK(sweep.code == 0);
  double worst = std::strtod(
      sweep.out.substr(sweep.out.find(':') + 1).c_str(), nullptr);
  CHECK(worst <= 56.67);
  CHECK(run_cmd(tmp.path, "table --which nonsense").code == 2);
}

TEST_CASE("usage errors") {
  TempDir tmp;
  CHECK(run_cmd(tmp.path, "run").code == 2);
  CHECK(run_cmd(tmp.path, "frobnicate").code == 2);
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 6 --mu 0.1 --L 1 --seed 1 --out q")
              .code == 0);
  CHECK(run_cmd(tmp.path, "run --problem q.json --method nope").code == 2);
  CHECK(run_cmd(tmp.path, "run --problem q.json --method ocgmg").code == 2);
  CHECK(run_cmd(tmp.path, "run --problem missing.json --method gm").code == 5);
}

TEST_CASE("config file supplies defaults, flags win") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind quadratic --n 8 --mu 0.1 --L 1 --seed 6 --out q")
              .code == 0);
  std::ofstream(tmp.path / "cfg.json")
      << R"({"problem":"q.json","method":"ogmg","T":8,"trace":"cfg.csv"})";
  CHECK(run_cmd(tmp.path, "run --config cfg.json").code == 0);
  CHECK(slurp(tmp.path / "cfg.csv").find("T=8") != std::string::npos);
  CHECK(run_cmd(tmp.path, "run --config cfg.json --T 4 --trace t4.csv").code ==
        0);
  CHECK(slurp(tmp.path / "t4.csv").find("T=4") != std::string::npos);
}

TEST_CASE("output directory env var") {
  TempDir tmp;
  fs::create_directories(tmp.path / "outputs");
  std::string cmd = "cd " + tmp.path.string() + " && GNM_OUT_DIR=outputs " +
                    binary() +
                    " gen --kind quadratic --n 6 --mu 0.1 --L 1 --seed 1 "
                    "--kind quadratic > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 0);
  CHECK(fs::exists(tmp.path / "outputs" / "quadratic.json"));
}

TEST_CASE("bench produces a report with decade columns") {
  TempDir tmp;
  REQUIRE(run_cmd(tmp.path,
                  "gen --kind lasso --m 30 --n 30 --lambda 4 --seed 9 "
                  "--out lp")
              .code == 0);
  auto b = run_cmd(tmp.path,
                   "bench --problem lp.json --budget 4000 --eps-rel 1e-6");
  REQUIRE(b.code == 0);
  json rep;
  std::ifstream repin(tmp.path / "bench_report.json");
  repin >> rep;
  auto& prob = rep["problems"][0];
  CHECK(prob["kind"] == "lasso");
  for (std::string m : {"acgm", "meta-fista", "meta"}) {
    auto& jm = prob["methods"][m];
    CHECK(jm["gmap_decade_calls"].size() == 8);
    CHECK(jm["oracle_calls"].get<long long>() <= 4000 + 64);
    // Budget accounting matches the trace's own counter.
    std::ifstream tin(jm["trace"].get<std::string>());
    std::string line, last;
    while (std::getline(tin, line))
      if (!line.empty()) last = line;
    auto first_comma = last.find(',');
    auto second_comma = last.find(',', first_comma + 1);
    long long counter = std::atoll(
        last.substr(first_comma + 1, second_comma - first_comma - 1).c_str());
    CHECK(counter == jm["oracle_calls"].get<long long>());
  }
}
