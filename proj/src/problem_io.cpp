#include "gnm/problem_io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gnm/trace.hpp"

namespace gnm::io {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot read " + path);
  return in;
}

std::string skip_comments(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') return line;
  }
  throw std::runtime_error("io: truncated matrix market file");
}

std::string base_name(const std::string& prefix) {
  return std::filesystem::path(prefix).filename().string();
}

}  // namespace

void save_matrix_market(const std::string& path, const DenseMatrix& A) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix array real general\n";
  out << A.rows << ' ' << A.cols << '\n';
  // Array format is column-major.
  for (int j = 0; j < A.cols; ++j)
    for (int i = 0; i < A.rows; ++i)
      out << format_double(A.a[static_cast<std::size_t>(i) * A.cols + j])
          << '\n';
}

void save_matrix_market(const std::string& path, const CsrMatrix& A) {
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows << ' ' << A.cols << ' ' << A.nnz() << '\n';
  for (int i = 0; i < A.rows; ++i)
    for (std::int64_t k = A.row_ptr[i]; k < A.row_ptr[i + 1]; ++k)
      out << i + 1 << ' ' << A.col[k] + 1 << ' ' << format_double(A.val[k])
          << '\n';
}

DenseMatrix load_matrix_market_dense(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  std::getline(in, header);
  if (header.find("array") == std::string::npos)
    throw std::runtime_error("io: expected array format in " + path);
  std::istringstream dims(skip_comments(in));
  DenseMatrix A;
  dims >> A.rows >> A.cols;
  if (A.rows < 1 || A.cols < 1)
    throw std::runtime_error("io: bad dimensions in " + path);
  A.a.assign(static_cast<std::size_t>(A.rows) * A.cols, 0.0);
  std::string line;
  for (int j = 0; j < A.cols; ++j)
    for (int i = 0; i < A.rows; ++i) {
      if (!std::getline(in, line))
        throw std::runtime_error("io: truncated " + path);
      A.a[static_cast<std::size_t>(i) * A.cols + j] =
          std::strtod(line.c_str(), nullptr);
    }
  return A;
}

CsrMatrix load_matrix_market_csr(const std::string& path) {
  auto in = open_in(path);
  std::string header;
  std::getline(in, header);
  if (header.find("coordinate") == std::string::npos)
    throw std::runtime_error("io: expected coordinate format in " + path);
  std::istringstream dims(skip_comments(in));
  CsrMatrix A;
  std::int64_t nnz = 0;
  dims >> A.rows >> A.cols >> nnz;
  std::vector<std::int64_t> counts(A.rows + 1, 0);
  std::vector<int> ri(nnz), ci(nnz);
  Vec vv(nnz);
  std::string line;
  for (std::int64_t k = 0; k < nnz; ++k) {
    if (!std::getline(in, line)) throw std::runtime_error("io: truncated " + path);
    std::istringstream ls(line);
    int i, j;
    std::string v;
    ls >> i >> j >> v;
    ri[k] = i - 1;
    ci[k] = j - 1;
    vv[k] = std::strtod(v.c_str(), nullptr);
    counts[i]++;
  }
  A.row_ptr.assign(A.rows + 1, 0);
  for (int i = 0; i < A.rows; ++i) A.row_ptr[i + 1] = A.row_ptr[i] + counts[i + 1];
  std::vector<std::int64_t> cursor(A.row_ptr.begin(), A.row_ptr.end() - 1);
  A.col.resize(nnz);
  A.val.resize(nnz);
  for (std::int64_t k = 0; k < nnz; ++k) {
    std::int64_t pos = cursor[ri[k]]++;
    A.col[pos] = ci[k];
    A.val[pos] = vv[k];
  }
  return A;
}

void save_column(const std::string& path, const Vec& v) {
  auto out = open_out(path);
  for (double x : v) out << format_double(x) << '\n';
}

Vec load_column(const std::string& path) {
  auto in = open_in(path);
  Vec v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    v.push_back(std::strtod(line.c_str(), nullptr));
  }
  return v;
}

void save_problem(const LassoInstance& inst, const std::string& prefix) {
  const std::string base = base_name(prefix);
  save_matrix_market(prefix + "_A.mtx", inst.A);
  save_column(prefix + "_b.txt", inst.b);
  save_column(prefix + "_start.txt", inst.start);
  json m = {{"schema", "gnm-problem-v1"},
            {"kind", "lasso"},
            {"m", inst.m},
            {"n", inst.n},
            {"lambda1", inst.lambda1},
            {"seed", inst.seed},
            {"L", inst.L},
            {"start", "gaussian"},
            {"files",
             {{"A", base + "_A.mtx"},
              {"b", base + "_b.txt"},
              {"start", base + "_start.txt"}}}};
  open_out(prefix + ".json") << m.dump(2) << '\n';
}

void save_problem(const NnlsInstance& inst, const std::string& prefix) {
  const std::string base = base_name(prefix);
  save_matrix_market(prefix + "_A.mtx", inst.A);
  save_column(prefix + "_b.txt", inst.b);
  save_column(prefix + "_x0.txt", inst.x0);
  save_column(prefix + "_e.txt", inst.noise);
  json m = {{"schema", "gnm-problem-v1"},
            {"kind", "nnls"},
            {"m", inst.m},
            {"n", inst.n},
            {"density", inst.density},
            {"nnz", inst.A.nnz()},
            {"seed", inst.seed},
            {"L", inst.L},
            // Solvers start at the planted point; recorded here since the
            // problem statement itself does not fix a starting rule.
            {"start", "planted_x0"},
            {"files",
             {{"A", base + "_A.mtx"},
              {"b", base + "_b.txt"},
              {"x0", base + "_x0.txt"},
              {"e", base + "_e.txt"}}}};
  open_out(prefix + ".json") << m.dump(2) << '\n';
}

void save_problem(const QuadraticInstance& inst, const std::string& prefix) {
  const std::string base = base_name(prefix);
  DenseMatrix H;
  H.rows = inst.n;
  H.cols = inst.n;
  H.a = inst.H;
  save_matrix_market(prefix + "_A.mtx", H);
  save_column(prefix + "_q.txt", inst.q);
  save_column(prefix + "_xstar.txt", inst.x_star);
  save_column(prefix + "_start.txt", inst.start);
  json m = {{"schema", "gnm-problem-v1"},
            {"kind", "quadratic"},
            {"n", inst.n},
            {"mu", inst.mu},
            {"L", inst.L},
            {"seed", inst.seed},
            {"start", "gaussian"},
            {"files",
             {{"A", base + "_A.mtx"},
              {"q", base + "_q.txt"},
              {"x_star", base + "_xstar.txt"},
              {"start", base + "_start.txt"}}}};
  open_out(prefix + ".json") << m.dump(2) << '\n';
}

LoadedProblem load_problem(const std::string& manifest_path) {
  json m;
  open_in(manifest_path) >> m;
  if (m.value("schema", "") != "gnm-problem-v1")
    throw std::runtime_error("io: unrecognized manifest schema");
  const auto dir = std::filesystem::path(manifest_path).parent_path();
  auto file = [&dir, &m](const char* key) {
    return (dir / m.at("files").at(key).get<std::string>()).string();
  };

  LoadedProblem out;
  out.kind = m.at("kind").get<std::string>();
  out.seed = m.value("seed", 0ULL);
  if (out.kind == "lasso") {
    auto A = load_matrix_market_dense(file("A"));
    auto b = load_column(file("b"));
    out.start = load_column(file("start"));
    out.problem = make_lasso_problem(std::move(A), std::move(b),
                                     m.at("lambda1").get<double>(),
                                     m.at("L").get<double>());
  } else if (out.kind == "nnls") {
    auto A = load_matrix_market_csr(file("A"));
    auto b = load_column(file("b"));
    out.start = load_column(file("x0"));
    out.problem =
        make_nnls_problem(std::move(A), std::move(b), m.at("L").get<double>());
  } else if (out.kind == "quadratic") {
    auto H = load_matrix_market_dense(file("A"));
    auto q = load_column(file("q"));
    auto xs = load_column(file("x_star"));
    out.start = load_column(file("start"));
    out.problem = make_quadratic_problem(H.rows, std::move(H.a), std::move(q),
                                         std::move(xs), m.at("L").get<double>(),
                                         m.value("mu", 0.0));
  } else {
    throw std::runtime_error("io: unknown problem kind " + out.kind);
  }
  return out;
}

}  // namespace gnm::io
