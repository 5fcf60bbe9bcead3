#include "spca/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace spca {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Five placements keep pairwise center distances above twice the blob radius
// (0.15 * min dimension), so the default supports never touch.
constexpr double kDisjointCenters[5][2] = {
    {0.24, 0.24}, {0.76, 0.26}, {0.26, 0.76}, {0.76, 0.76}, {0.50, 0.50}};
constexpr double kPackedCenters[5][2] = {
    {0.40, 0.40}, {0.52, 0.44}, {0.44, 0.55}, {0.55, 0.55}, {0.48, 0.48}};
constexpr double kFrequenciesHz[5] = {0.17, 0.47, 0.79, 0.91, 0.61};

Matrix blob_shape(Index h, Index w, double ci, double cj, double radius) {
  Matrix shape = Matrix::Zero(h, w);
  // Wide sigma keeps the rim above 0.8 of the peak: support cells then live
  // or die together under sparse shrinkage instead of eroding from the edge.
  const double sigma = radius / 0.6;
  for (Index j = 0; j < w; ++j)
    for (Index i = 0; i < h; ++i) {
      double di = static_cast<double>(i) - ci;
      double dj = static_cast<double>(j) - cj;
      double d2 = di * di + dj * dj;
      if (d2 <= radius * radius) shape(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  return shape;
}

// Alternating off/on dwells, each at least 10 timesteps long; redraw until the
// mode is active for a believable fraction of the record.
std::vector<std::pair<double, double>> draw_intervals(double duration, double dt,
                                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dwell(10.0 * dt, duration / 4.0);
  std::bernoulli_distribution coin(0.5);
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::vector<std::pair<double, double>> intervals;
    double cursor = 0.0;
    bool on = coin(rng);
    double on_total = 0.0;
    while (cursor < duration) {
      double len = std::min(dwell(rng), duration - cursor);
      if (on) {
        intervals.emplace_back(cursor, cursor + len);
        on_total += len;
      }
      cursor += len;
      on = !on;
    }
    double fraction = on_total / duration;
    if (fraction >= 0.3 && fraction <= 0.8) return intervals;
  }
  return {{0.0, duration}};
}

}  // namespace

MultiscaleSpec MultiscaleSpec::defaults(Index grid_h, Index grid_w, Index snapshots,
                                        double dt_s, int n_modes, bool overlap,
                                        std::uint64_t seed) {
  if (n_modes < 1 || n_modes > 5)
    throw std::invalid_argument("MultiscaleSpec::defaults: n_modes must be in [1, 5]");
  if (std::min(grid_h, grid_w) < 8)
    throw std::invalid_argument("MultiscaleSpec::defaults: grid must be at least 8x8");
  if (snapshots < 2) throw std::invalid_argument("MultiscaleSpec::defaults: need >= 2 snapshots");
  if (!(dt_s > 0.0)) throw std::invalid_argument("MultiscaleSpec::defaults: dt must be positive");

  MultiscaleSpec spec;
  spec.grid_h = grid_h;
  spec.grid_w = grid_w;
  spec.dt_s = dt_s;
  spec.duration_s = static_cast<double>(snapshots) * dt_s;

  const double radius = 0.15 * static_cast<double>(std::min(grid_h, grid_w));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_draw(0.0, kTwoPi);

  for (int j = 0; j < n_modes; ++j) {
    const double* c = overlap ? kPackedCenters[j] : kDisjointCenters[j];
    ModeSpec mode;
    mode.shape = blob_shape(grid_h, grid_w, c[0] * static_cast<double>(grid_h),
                            c[1] * static_cast<double>(grid_w), radius);
    mode.frequency_hz = kFrequenciesHz[j];
    // The leading mode dominates; the rest share one power level so that
    // their sample covariance block is (near) degenerate and eigenvectors
    // rotate freely inside it.
    mode.amplitude = j == 0 ? 1.0 : 0.62;
    mode.phase = phase_draw(rng);
    mode.on_intervals = draw_intervals(spec.duration_s, dt_s, rng);
    spec.modes.push_back(std::move(mode));
  }
  return spec;
}

MultiscaleData generate_multiscale(const MultiscaleSpec& spec) {
  if (spec.modes.empty())
    throw std::invalid_argument("generate_multiscale: at least one mode is required");
  if (spec.grid_h < 1 || spec.grid_w < 1)
    throw std::invalid_argument("generate_multiscale: grid dimensions must be positive");
  if (!(spec.dt_s > 0.0) || !(spec.duration_s > 0.0))
    throw std::invalid_argument("generate_multiscale: duration and dt must be positive");

  const double ratio = spec.duration_s / spec.dt_s;
  const Index n = static_cast<Index>(std::llround(ratio));
  if (n < 1 || std::abs(static_cast<double>(n) * spec.dt_s - spec.duration_s) >
                   1e-9 * std::max(spec.dt_s, spec.duration_s))
    throw std::invalid_argument("generate_multiscale: duration must be an integer number of "
                                "timesteps, got duration/dt = " +
                                std::to_string(ratio));

  const Index p = spec.grid_h * spec.grid_w;
  const Index m = static_cast<Index>(spec.modes.size());

  MultiscaleData data;
  data.modes = Matrix::Zero(p, m);
  data.masks = Matrix::Zero(p, m);
  data.amplitudes = Matrix::Zero(n, m);

  for (Index j = 0; j < m; ++j) {
    const ModeSpec& mode = spec.modes[static_cast<std::size_t>(j)];
    if (mode.shape.rows() != spec.grid_h || mode.shape.cols() != spec.grid_w)
      throw std::invalid_argument("generate_multiscale: mode " + std::to_string(j) +
                                  " shape does not match the grid");
    require_finite(mode.shape, "generate_multiscale: mode shape");
    if (!(mode.amplitude > 0.0))
      throw std::invalid_argument("generate_multiscale: mode amplitude must be positive");
    if (mode.frequency_hz < 0.0)
      throw std::invalid_argument("generate_multiscale: mode frequency must be nonnegative");
    for (const auto& [start, end] : mode.on_intervals)
      if (!(start < end))
        throw std::invalid_argument("generate_multiscale: empty on-interval [" +
                                    std::to_string(start) + ", " + std::to_string(end) + ")");

    // The h x w shape is stored column-major, which is exactly the pixel
    // flattening used for the data columns.
    data.modes.col(j) = Eigen::Map<const Vector>(mode.shape.data(), p);
    double norm = data.modes.col(j).norm();
    if (norm == 0.0)
      throw std::invalid_argument("generate_multiscale: mode " + std::to_string(j) +
                                  " has empty support");
    data.modes.col(j) /= norm;
    for (Index i = 0; i < p; ++i) data.masks(i, j) = data.modes(i, j) != 0.0 ? 1.0 : 0.0;

    for (Index t = 0; t < n; ++t) {
      double time = static_cast<double>(t) * spec.dt_s;
      bool on = false;
      for (const auto& [start, end] : mode.on_intervals)
        if (time >= start && time < end) {
          on = true;
          break;
        }
      data.amplitudes(t, j) =
          on ? std::sin(kTwoPi * mode.frequency_hz * time + mode.phase) : 0.0;
    }
    // Rescale the gated sinusoid so the delivered RMS power matches the
    // request exactly; equal requests then give exactly equal column norms.
    double rms = std::sqrt(data.amplitudes.col(j).squaredNorm() / static_cast<double>(n));
    if (rms > 0.0) data.amplitudes.col(j) *= mode.amplitude / rms;
  }

  data.x = data.amplitudes * data.modes.transpose();
  return data;
}

CorruptionResult corrupt(const Matrix& x, const CorruptionSpec& spec) {
  if (x.size() == 0) throw std::invalid_argument("corrupt: input matrix is empty");
  require_finite(x, "corrupt: input matrix");
  if (!(spec.fraction >= 0.0) || !(spec.fraction <= 1.0))
    throw std::invalid_argument("corrupt: fraction must lie in [0, 1], got " +
                                std::to_string(spec.fraction));
  if (!(spec.magnitude > 0.0))
    throw std::invalid_argument("corrupt: magnitude must be positive");

  const Index total = x.size();
  const Index count =
      static_cast<Index>(std::llround(spec.fraction * static_cast<double>(total)));

  CorruptionResult out{x, Matrix::Zero(x.rows(), x.cols())};
  if (count == 0) return out;

  // Partial Fisher-Yates: the first `count` slots end up holding a uniform
  // sample of cells without replacement.
  std::vector<Index> cells(static_cast<std::size_t>(total));
  for (Index i = 0; i < total; ++i) cells[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  for (Index t = 0; t < count; ++t) {
    std::uniform_int_distribution<Index> pick(t, total - 1);
    std::swap(cells[static_cast<std::size_t>(t)], cells[static_cast<std::size_t>(pick(rng))]);
    Index cell = cells[static_cast<std::size_t>(t)];
    Index i = cell % x.rows();
    Index j = cell / x.rows();
    out.corrupted(i, j) += coin(rng) ? spec.magnitude : -spec.magnitude;
    out.mask(i, j) = 1.0;
  }
  return out;
}

std::vector<ModeScore> score_support_recovery(const Matrix& truth_masks, const Matrix& loadings,
                                              double threshold) {
  if (truth_masks.size() == 0)
    throw std::invalid_argument("score_support_recovery: no truth masks");
  if (loadings.rows() != truth_masks.rows())
    throw std::invalid_argument("score_support_recovery: loadings have " +
                                std::to_string(loadings.rows()) + " rows, masks have " +
                                std::to_string(truth_masks.rows()));
  if (!(threshold >= 0.0))
    throw std::invalid_argument("score_support_recovery: threshold must be nonnegative");

  const Index m = truth_masks.cols();
  const Index k = loadings.cols();
  const Index p = truth_masks.rows();

  Matrix jaccard = Matrix::Zero(m, k);
  for (Index a = 0; a < m; ++a)
    for (Index b = 0; b < k; ++b) {
      Index inter = 0, uni = 0;
      for (Index i = 0; i < p; ++i) {
        bool t = truth_masks(i, a) != 0.0;
        bool pred = std::abs(loadings(i, b)) > threshold;
        if (t && pred) ++inter;
        if (t || pred) ++uni;
      }
      jaccard(a, b) =
          uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }

  // Greedy maximum matching; ties resolve to the lowest mode, then column.
  std::vector<ModeScore> scores(static_cast<std::size_t>(m));
  for (Index a = 0; a < m; ++a) scores[static_cast<std::size_t>(a)].mode = a;
  std::vector<bool> mode_done(static_cast<std::size_t>(m), false);
  std::vector<bool> col_done(static_cast<std::size_t>(k), false);
  const Index rounds = std::min(m, k);
  for (Index round = 0; round < rounds; ++round) {
    Index best_a = -1, best_b = -1;
    double best = -1.0;
    for (Index a = 0; a < m; ++a) {
      if (mode_done[static_cast<std::size_t>(a)]) continue;
      for (Index b = 0; b < k; ++b) {
        if (col_done[static_cast<std::size_t>(b)]) continue;
        if (jaccard(a, b) > best) {
          best = jaccard(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }
    mode_done[static_cast<std::size_t>(best_a)] = true;
    col_done[static_cast<std::size_t>(best_b)] = true;
    ModeScore& s = scores[static_cast<std::size_t>(best_a)];
    s.matched_column = best_b;
    s.jaccard = best;
    s.f1 = 2.0 * best / (1.0 + best);
  }
  return scores;
}

}  // namespace spca
