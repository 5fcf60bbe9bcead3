#include "spca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spca/procrustes.hpp"
#include "spca/sketch.hpp"

namespace spca {

namespace {

constexpr double kSpectralTol = 1e-6;

// 0.5 ||x - x b a^T||_F^2 expanded through the k x k Gram matrices; needs
// z = x b and m = x^T z but never an n x p residual.
double gram_objective(double xfro2, const Matrix& a, const Matrix& m, const Matrix& z) {
  double cross = a.cwiseProduct(m).sum();
  Matrix ztz = z.transpose() * z;
  Matrix ata = a.transpose() * a;
  return 0.5 * xfro2 - cross + 0.5 * ztz.cwiseProduct(ata).sum();
}

// Flip columns of b (and the paired column of a) so the largest-magnitude
// loading is nonnegative. (-x)*(-y) == x*y exactly, so reconstructions and
// objectives are bit-identical after the flip.
void canonicalize_signs(Matrix& b, Matrix& a) {
  for (Index j = 0; j < b.cols(); ++j) {
    Index imax = 0;
    double vmax = b.col(j).cwiseAbs().maxCoeff(&imax);
    if (vmax > 0.0 && b(imax, j) < 0.0) {
      b.col(j) = -b.col(j);
      a.col(j) = -a.col(j);
    }
  }
}

void validate(const Matrix& x, const SolverConfig& cfg) {
  if (x.size() == 0) throw std::invalid_argument("solve: input matrix is empty");
  require_finite(x, "solve: input matrix");
  if (x.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("solve: input matrix is identically zero");
  Index top = std::min(x.rows(), x.cols());
  if (cfg.rank < 1 || cfg.rank > top)
    throw std::invalid_argument("solve: rank must be in [1, " + std::to_string(top) +
                                "], got " + std::to_string(cfg.rank));
  cfg.regularizer.validate(x.cols());
  if (cfg.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve: tol must be positive");
  if (cfg.step_size && !(*cfg.step_size > 0.0))
    throw std::invalid_argument("solve: step_size must be positive");
  if (cfg.init_loadings) {
    if (cfg.init_loadings->rows() != x.cols() || cfg.init_loadings->cols() != cfg.rank)
      throw std::invalid_argument("solve: init_loadings must be " + std::to_string(x.cols()) +
                                  " x " + std::to_string(cfg.rank));
    require_finite(*cfg.init_loadings, "solve: init_loadings");
  }
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::converged_stationarity:
      return "converged_stationarity";
    case Termination::converged_objective:
      return "converged_objective";
    case Termination::max_iter:
      return "max_iter";
  }
  return "unknown";
}

ValueGradient value_and_gradient(const Matrix& x, const Matrix& b) {
  if (x.size() == 0 || b.size() == 0)
    throw std::invalid_argument("value_and_gradient: empty input");
  if (b.rows() != x.cols())
    throw std::invalid_argument("value_and_gradient: loadings must have " +
                                std::to_string(x.cols()) + " rows");
  require_finite(x, "value_and_gradient: x");
  require_finite(b, "value_and_gradient: b");

  Matrix z = x * b;
  Matrix m = x.transpose() * z;
  Matrix a = polar_factor(m);
  ValueGradient out;
  out.value = gram_objective(x.squaredNorm(), a, m, z);
  out.gradient = m - x.transpose() * (x * a);
  out.a = std::move(a);
  return out;
}

double stationarity(const Matrix& b_prev, const Matrix& b_next, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("stationarity: gamma must be positive");
  if (b_prev.rows() != b_next.rows() || b_prev.cols() != b_next.cols())
    throw std::invalid_argument("stationarity: shape mismatch");
  return (b_prev - b_next).squaredNorm() / (gamma * gamma);
}

SpcaResult solve(const Matrix& x, const SolverConfig& cfg) {
  if (cfg.randomized) return solve_randomized(x, cfg);
  validate(x, cfg);

  const Index k = cfg.rank;
  const double gamma =
      cfg.step_size ? *cfg.step_size
                    : 1.0 / ((1.0 + kSpectralTol) * spectral_norm_sq(x, kSpectralTol));
  const double xfro2 = x.squaredNorm();

  Matrix b, a;
  if (cfg.init_loadings) {
    b = *cfg.init_loadings;
    a = procrustes_update(x, b);
  } else {
    b = top_right_singular_vectors(x, k);
    a = b;
  }
  Matrix z0 = x * b;
  Matrix m = x.transpose() * z0;
  double obj = gram_objective(xfro2, a, m, z0) + eval_psi(cfg.regularizer, b);
  z0.resize(0, 0);

  SpcaResult res;
  res.step_size = gamma;
  res.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);
  res.stationarity_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
  res.objective_trace.push_back(obj);

  // Momentum state; with fista off y tracks b and adds no work.
  Matrix y = b, ay = a, my = m;
  double tk = 1.0;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    Matrix bn, zn, mn, an;
    double objn;
    auto prox_step = [&](const Matrix& point, const Matrix& mp, const Matrix& ap) {
      Matrix g = mp - x.transpose() * (x * ap);
      bn = prox(cfg.regularizer, point - gamma * g, gamma);
      zn = x * bn;
      mn = x.transpose() * zn;
      an = polar_factor(mn);
      objn = gram_objective(xfro2, an, mn, zn) + eval_psi(cfg.regularizer, bn);
    };

    if (cfg.fista) {
      prox_step(y, my, ay);
      if (objn > obj) {
        // Momentum overshot; redo as a plain step, which cannot ascend.
        prox_step(b, m, a);
        tk = 1.0;
      }
    } else {
      prox_step(b, m, a);
    }

    if (!std::isfinite(objn) || !bn.allFinite())
      throw numerical_error("solve: non-finite update at iteration " + std::to_string(it) +
                            "; step size " + std::to_string(gamma) + " is too large");

    double t_stat = stationarity(b, bn, gamma);
    res.objective_trace.push_back(objn);
    res.stationarity_trace.push_back(t_stat);
    res.iterations = it;

    if (cfg.fista) {
      double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
      y = bn + ((tk - 1.0) / tn) * (bn - b);
      tk = tn;
      my = x.transpose() * (x * y);
      ay = polar_factor(my);
    }

    double prev = obj;
    b.swap(bn);
    a.swap(an);
    m.swap(mn);
    obj = objn;

    if (t_stat < cfg.tol) {
      res.termination = Termination::converged_stationarity;
      break;
    }
    if (std::abs(obj - prev) / std::max(1.0, std::abs(prev)) < cfg.tol) {
      res.termination = Termination::converged_objective;
      break;
    }
  }

  canonicalize_signs(b, a);
  res.b = std::move(b);
  res.a = std::move(a);
  return res;
}

Components extract_components(const Matrix& x, const SpcaResult& result) {
  if (result.b.rows() != x.cols())
    throw std::invalid_argument("extract_components: loadings do not match the data width");
  Components c;
  c.z = x * result.b;
  c.reconstruction = c.z * result.a.transpose();
  return c;
}

VarianceReport explained_variance(const Matrix& x, const SpcaResult& result) {
  if (result.b.rows() != x.cols())
    throw std::invalid_argument("explained_variance: loadings do not match the data width");
  const Index k = result.b.cols();
  if (x.rows() < k)
    throw std::invalid_argument("explained_variance: fewer observations than components");

  // Normalize nonzero columns so a column's scale cannot inflate its share,
  // then QR-orthogonalize the scores: variance shared between correlated
  // components is attributed to the earlier column, and the cumulative sum
  // stays below the total.
  Matrix bn = result.b;
  for (Index j = 0; j < k; ++j) {
    double norm = bn.col(j).norm();
    if (norm > 0.0) bn.col(j) /= norm;
  }
  Matrix z = x * bn;
  Eigen::HouseholderQR<Matrix> qr(z);
  Vector diag = qr.matrixQR().diagonal().head(k);

  const double total = x.squaredNorm();
  VarianceReport report;
  report.per_component = Vector::Zero(k);
  report.cumulative = Vector::Zero(k);
  double running = 0.0;
  for (Index j = 0; j < k; ++j) {
    report.per_component(j) = diag(j) * diag(j) / total;
    running += report.per_component(j);
    report.cumulative(j) = running;
  }
  return report;
}

double objective_value(const Matrix& x, const Matrix& a, const Matrix& b,
                       const RegularizerSpec& spec) {
  if (b.rows() != x.cols() || a.rows() != x.cols() || a.cols() != b.cols())
    throw std::invalid_argument("objective_value: factor shapes do not match the data");
  Matrix z = x * b;
  Matrix m = x.transpose() * z;
  return gram_objective(x.squaredNorm(), a, m, z) + eval_psi(spec, b);
}

}  // namespace spca
