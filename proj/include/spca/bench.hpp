#pragma once

#include "spca/solver.hpp"

#include <string>
#include <vector>

namespace spca {

struct BenchSpec {
  std::vector<std::pair<Index, Index>> shapes;  // (n, p)
  Index data_rank = 10;  // exact rank of the synthetic input
  Index rank = 10;       // components solved for
  int repetitions = 3;   // >= 3; medians are reported
  double alpha = 1e-3;   // l1 weight used by both configurations
  double tol = 1e-5;
  int max_iter = 1000;   // both configurations share the cap
  Index oversample = 10;
  int power_iters = 2;
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::string config;  // "deterministic" or "randomized"
  Index n = 0;
  Index p = 0;
  double median_time_s = 0.0;
  double min_time_s = 0.0;
  double max_time_s = 0.0;
  double objective = 0.0;  // final objective evaluated on the full matrix
  int iterations = 0;
};

// Exact rank-r synthetic (orthonormal factors, singular values r..1) plus
// 1e-6 Gaussian noise; both configurations of a shape share one instance.
Matrix bench_matrix(Index n, Index p, Index data_rank, std::uint64_t seed);

// Runs the deterministic and randomized solvers on every shape; timings are
// wall clock per repetition on fresh result buffers.
std::vector<BenchRow> run_bench(const BenchSpec& spec);

std::string bench_table(const std::vector<BenchRow>& rows);
void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows);

}  // namespace spca
