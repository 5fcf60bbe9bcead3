#include "spca/sketch.hpp"

#include <random>
#include <string>

namespace spca {

Sketch randomized_sketch(const Matrix& x, const SketchConfig& cfg) {
  if (x.size() == 0) throw std::invalid_argument("randomized_sketch: input matrix is empty");
  require_finite(x, "randomized_sketch: input matrix");
  if (cfg.target_rank < 1)
    throw std::invalid_argument("randomized_sketch: target_rank must be >= 1");
  if (cfg.oversample < 0)
    throw std::invalid_argument("randomized_sketch: oversample must be >= 0");
  if (cfg.power_iters < 0)
    throw std::invalid_argument("randomized_sketch: power_iters must be >= 0");

  const Index l = cfg.target_rank + cfg.oversample;
  const Index top = std::min(x.rows(), x.cols());
  if (l > top)
    throw std::invalid_argument("randomized_sketch: sketch size " + std::to_string(l) +
                                " exceeds min(rows, cols) = " + std::to_string(top) +
                                "; reduce rank or oversample");

  // Column-major fill order is part of the determinism contract: the same
  // seed must reproduce the same test matrix on any platform.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix omega(x.cols(), l);
  for (Index j = 0; j < l; ++j)
    for (Index i = 0; i < x.cols(); ++i) omega(i, j) = gauss(rng);

  // Re-orthonormalize after every application of x and x^T; skipping the
  // intermediate QR lets rounding collapse the basis for fast-decay spectra.
  Sketch out;
  out.q = qr_orthonormal(x * omega).q;
  for (int t = 0; t < cfg.power_iters; ++t) {
    Matrix qz = qr_orthonormal(x.transpose() * out.q).q;
    out.q = qr_orthonormal(x * qz).q;
  }
  out.compressed = out.q.transpose() * x;
  return out;
}

SpcaResult solve_randomized(const Matrix& x, const SolverConfig& cfg) {
  SketchConfig sketch_cfg;
  sketch_cfg.target_rank = cfg.rank;
  sketch_cfg.oversample = cfg.oversample;
  sketch_cfg.power_iters = cfg.power_iters;
  sketch_cfg.seed = cfg.seed;
  Sketch sketch = randomized_sketch(x, sketch_cfg);

  SolverConfig inner = cfg;
  inner.randomized = false;
  return solve(sketch.compressed, inner);
}

}  // namespace spca
