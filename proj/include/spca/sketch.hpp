#pragma once

#include "spca/solver.hpp"

namespace spca {

struct SketchConfig {
  Index target_rank = 1;
  Index oversample = 10;
  int power_iters = 2;  // subspace iterations after the first pass
  std::uint64_t seed = 0;
};

struct Sketch {
  Matrix q;           // n x l orthonormal range basis
  Matrix compressed;  // l x p, q^T x
};

// Row-space sketch q^T x, l = target_rank + oversample, built from a Gaussian
// range finder with re-orthonormalization after every application of x and
// x^T. Fixed seed gives a bitwise-identical sketch. Throws
// std::invalid_argument when l exceeds min(n, p).
Sketch randomized_sketch(const Matrix& x, const SketchConfig& config);

// solve() on the sketch; loadings and directions stay p x k, traces are the
// sketch-space objective. Callers evaluate final quality on the full matrix.
SpcaResult solve_randomized(const Matrix& x, const SolverConfig& config);

}  // namespace spca
