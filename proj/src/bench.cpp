#include "spca/bench.hpp"

#include "spca/io.hpp"
#include "spca/procrustes.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <random>
#include <sstream>

namespace spca {

namespace {

Matrix gaussian(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

BenchRow time_config(const Matrix& x, const SolverConfig& cfg, const std::string& name,
                     int repetitions, double alpha) {
  BenchRow row;
  row.config = name;
  row.n = x.rows();
  row.p = x.cols();
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  SpcaResult result;
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    result = solve(x, cfg);
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  row.median_time_s = median(times);
  row.min_time_s = *std::min_element(times.begin(), times.end());
  row.max_time_s = *std::max_element(times.begin(), times.end());
  RegularizerSpec reg;
  reg.kind = Regularizer::l1;
  reg.alpha = alpha;
  // Evaluated on the full matrix so the two configurations are comparable
  // even though the randomized path optimizes the compressed problem.
  row.objective = objective_value(x, result.a, result.b, reg);
  row.iterations = result.iterations;
  return row;
}

}  // namespace

Matrix bench_matrix(Index n, Index p, Index data_rank, std::uint64_t seed) {
  if (n < 1 || p < 1) throw std::invalid_argument("bench_matrix: empty shape");
  if (data_rank < 1 || data_rank > std::min(n, p))
    throw std::invalid_argument("bench_matrix: data_rank must be in [1, min(n, p)]");
  std::mt19937_64 rng(seed);
  const Matrix u = qr_orthonormal(gaussian(n, data_rank, rng)).q;
  const Matrix v = qr_orthonormal(gaussian(p, data_rank, rng)).q;
  Vector s(data_rank);
  for (Index i = 0; i < data_rank; ++i) s(i) = double(data_rank - i);
  Matrix x = u * s.asDiagonal() * v.transpose();
  x += 1e-6 * gaussian(n, p, rng);
  return x;
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  if (spec.shapes.empty()) throw std::invalid_argument("run_bench: no shapes given");
  if (spec.repetitions < 3)
    throw std::invalid_argument("run_bench: need at least 3 repetitions for a median");
  if (spec.data_rank < 1 || spec.rank < 1)
    throw std::invalid_argument("run_bench: ranks must be positive");
  if (spec.max_iter < 1) throw std::invalid_argument("run_bench: max_iter must be >= 1");

  std::vector<BenchRow> rows;
  rows.reserve(2 * spec.shapes.size());
  std::uint64_t instance_seed = spec.seed;
  for (const auto& [n, p] : spec.shapes) {
    const Matrix x = bench_matrix(n, p, spec.data_rank, instance_seed++);

    SolverConfig cfg;
    cfg.rank = spec.rank;
    cfg.regularizer.kind = Regularizer::l1;
    cfg.regularizer.alpha = spec.alpha;
    cfg.tol = spec.tol;
    cfg.max_iter = spec.max_iter;
    cfg.seed = spec.seed;

    rows.push_back(time_config(x, cfg, "deterministic", spec.repetitions, spec.alpha));

    cfg.randomized = true;
    cfg.oversample = spec.oversample;
    cfg.power_iters = spec.power_iters;
    rows.push_back(time_config(x, cfg, "randomized", spec.repetitions, spec.alpha));
  }
  return rows;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "config         n      p      median_time_s  min_time_s  max_time_s  "
         "objective      iterations\n";
  for (const auto& r : rows) {
    auto pad = [&out](const std::string& s, std::size_t w) {
      out << s << ' ';
      for (std::size_t i = s.size() + 1; i < w; ++i) out << ' ';
    };
    pad(r.config, 15);
    pad(std::to_string(r.n), 7);
    pad(std::to_string(r.p), 7);
    pad(format_double(r.median_time_s), 15);
    pad(format_double(r.min_time_s), 12);
    pad(format_double(r.max_time_s), 12);
    pad(format_double(r.objective), 15);
    out << r.iterations << '\n';
  }
  return out.str();
}

void write_bench_csv(const std::string& path, const std::vector<BenchRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "config,n,p,median_time_s,min_time_s,max_time_s,objective,iterations\n";
  for (const auto& r : rows)
    out << r.config << ',' << r.n << ',' << r.p << ',' << format_double(r.median_time_s)
        << ',' << format_double(r.min_time_s) << ',' << format_double(r.max_time_s) << ','
        << format_double(r.objective) << ',' << r.iterations << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace spca
