#pragma once

#include "spca/prox.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace spca {

struct SolverConfig {
  Index rank = 1;
  RegularizerSpec regularizer;
  int max_iter = 1000;
  double tol = 1e-5;
  // Fixed step size gamma; default is 1 / ((1 + 1e-6) * ||x||_2^2) with the
  // squared spectral norm estimated by power iteration.
  std::optional<double> step_size;
  bool center = true;  // consumed by the CLI before solve(); solve() never centers
  std::uint64_t seed = 0;
  bool randomized = false;
  Index oversample = 10;
  int power_iters = 2;
  std::optional<double> huber_kappa;  // robust solver; default is a MAD estimate
  bool fista = false;                 // optional acceleration; descent not guaranteed
  std::optional<Matrix> init_loadings;  // overrides the PCA warm start
};

enum class Termination { converged_stationarity, converged_objective, max_iter };
const char* to_string(Termination t);

struct SpcaResult {
  Matrix a;               // orthonormal directions, p x k
  Matrix b;               // sparse loadings, p x k
  std::optional<Matrix> s;  // sparse outliers, n x p; robust solver only
  std::vector<double> objective_trace;     // iterations + 1 entries, [0] at the start
  std::vector<double> stationarity_trace;  // one entry per iteration
  int iterations = 0;
  Termination termination = Termination::max_iter;
  double step_size = 0.0;             // gamma actually used
  std::optional<double> huber_kappa;  // kappa actually used; robust solver only

  bool converged() const { return termination != Termination::max_iter; }
};

// v(b) = 0.5 * ||x - x b a(b)^T||_F^2 with a(b) the orthonormal factor that
// minimizes the residual for fixed b. The gradient is x^T (x b a^T - x) a,
// valid wherever a(b) is unique.
struct ValueGradient {
  double value;
  Matrix gradient;
  Matrix a;
};
ValueGradient value_and_gradient(const Matrix& x, const Matrix& b);

// Proximal residual (1/gamma)^2 * ||b_prev - b_next||_F^2; the solver's
// first-order stationarity surrogate.
double stationarity(const Matrix& b_prev, const Matrix& b_next, double gamma);

// Alternating proximal-gradient solver. Throws std::invalid_argument on bad
// configuration or a zero/empty input, numerical_error if an iteration
// produces non-finite values. config.randomized dispatches to the sketched
// path (see sketch.hpp).
SpcaResult solve(const Matrix& x, const SolverConfig& config);

struct Components {
  Matrix z;               // n x k component scores, z = x b
  Matrix reconstruction;  // n x p, z a^T
};
Components extract_components(const Matrix& x, const SpcaResult& result);

// Variance captured by z = x b after a QR re-orthogonalization of z, so
// correlated components are not double counted. Loadings columns are scaled
// to unit norm first; fractions are of trace(x^T x).
struct VarianceReport {
  Vector per_component;
  Vector cumulative;
};
VarianceReport explained_variance(const Matrix& x, const SpcaResult& result);

// 0.5 * ||x - x b a^T||_F^2 + psi(b), the quantity solve() traces. Computed
// through k x k Gram blocks, never an n x p residual.
double objective_value(const Matrix& x, const Matrix& a, const Matrix& b,
                       const RegularizerSpec& spec);

}  // namespace spca
