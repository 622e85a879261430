#pragma once

#include <string>

#include "gnm/generators.hpp"

namespace gnm::io {

// On-disk layout: <prefix>.json manifest next to Matrix Market files for
// the operator and one-value-per-line float columns for the vectors.
// Doubles are written in shortest round-trip form, so save/load is
// lossless for every recorded field.

void save_matrix_market(const std::string& path, const DenseMatrix& A);
void save_matrix_market(const std::string& path, const CsrMatrix& A);
DenseMatrix load_matrix_market_dense(const std::string& path);
CsrMatrix load_matrix_market_csr(const std::string& path);

void save_column(const std::string& path, const Vec& v);
Vec load_column(const std::string& path);

void save_problem(const LassoInstance& inst, const std::string& prefix);
void save_problem(const NnlsInstance& inst, const std::string& prefix);
void save_problem(const QuadraticInstance& inst, const std::string& prefix);

struct LoadedProblem {
  std::string kind;
  ProblemPtr problem;
  Vec start;
  std::uint64_t seed = 0;
};

LoadedProblem load_problem(const std::string& manifest_path);

}  // namespace gnm::io
