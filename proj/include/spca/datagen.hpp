#pragma once

#include "spca/matrix.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace spca {

struct ModeSpec {
  Matrix shape;  // grid_h x grid_w spatial pattern, zero outside the support
  double frequency_hz = 0.0;
  double amplitude = 1.0;
  double phase = 0.0;
  // Half-open [start, end) activity windows in seconds; the mode is silent
  // outside them.
  std::vector<std::pair<double, double>> on_intervals;
};

struct MultiscaleSpec {
  Index grid_h = 40;
  Index grid_w = 40;
  double duration_s = 150.0;
  double dt_s = 0.5;
  std::vector<ModeSpec> modes;

  // Disjoint unit-norm blob modes with distinct frequencies and irregular
  // on/off gating (minimum dwell 10 * dt). Modes beyond the first share one
  // power level, so a plain eigendecomposition mixes them while a sparse
  // penalty can still separate the supports. overlap = true packs the blobs
  // close enough to intersect.
  static MultiscaleSpec defaults(Index grid_h = 40, Index grid_w = 40,
                                 Index snapshots = 300, double dt_s = 0.5,
                                 int n_modes = 3, bool overlap = false,
                                 std::uint64_t seed = 0);
};

struct MultiscaleData {
  Matrix x;           // snapshots x (grid_h * grid_w); rows are frames,
                      // pixels flattened column-major
  Matrix modes;       // p x m ground-truth spatial modes
  Matrix amplitudes;  // n x m ground-truth time courses
  Matrix masks;       // p x m 0/1 supports of the modes
};

// x = amplitudes * modes^T exactly, so rank(x) <= number of modes and every
// frame is the sum of the modes active at that instant.
MultiscaleData generate_multiscale(const MultiscaleSpec& spec);

struct CorruptionSpec {
  double fraction = 0.0;   // in [0, 1]; exactly round(fraction * n * p) entries hit
  double magnitude = 1.0;  // spike size added with a random sign
  std::uint64_t seed = 0;
};

struct CorruptionResult {
  Matrix corrupted;
  Matrix mask;  // n x p 0/1; off-mask entries are bitwise untouched
};
CorruptionResult corrupt(const Matrix& x, const CorruptionSpec& spec);

struct ModeScore {
  Index mode = -1;
  Index matched_column = -1;  // -1 when fewer loading columns than modes
  double jaccard = 0.0;
  double f1 = 0.0;
};

// Binarizes |loadings| > threshold and greedily matches columns to truth
// supports by maximal Jaccard overlap; each column is used at most once.
std::vector<ModeScore> score_support_recovery(const Matrix& truth_masks,
                                              const Matrix& loadings,
                                              double threshold);

}  // namespace spca
