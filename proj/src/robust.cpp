#include "spca/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spca/procrustes.hpp"

namespace spca {

namespace {

constexpr double kSpectralTol = 1e-6;
constexpr double kHuberEfficiency = 1.345;   // 95% efficiency under Gaussian noise
constexpr double kMadToSigma = 1.4826;       // MAD of a Gaussian -> standard deviation

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  double upper = *mid;
  if (n % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

Matrix soft_threshold(const Matrix& m, double t) {
  Matrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      out(i, j) = std::copysign(std::max(std::abs(m(i, j)) - t, 0.0), m(i, j));
  return out;
}

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
  if (x.size() == 0) throw std::invalid_argument("solve_robust: input matrix is empty");
  require_finite(x, "solve_robust: input matrix");
  if (x.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("solve_robust: input matrix is identically zero");
  Index top = std::min(x.rows(), x.cols());
  if (cfg.rank < 1 || cfg.rank > top)
    throw std::invalid_argument("solve_robust: rank must be in [1, " + std::to_string(top) +
                                "], got " + std::to_string(cfg.rank));
  cfg.regularizer.validate(x.cols());
  if (cfg.max_iter < 1) throw std::invalid_argument("solve_robust: max_iter must be >= 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("solve_robust: tol must be positive");
  if (cfg.step_size && !(*cfg.step_size > 0.0))
    throw std::invalid_argument("solve_robust: step_size must be positive");
  if (cfg.huber_kappa && !(*cfg.huber_kappa > 0.0))
    throw std::invalid_argument("solve_robust: huber_kappa must be positive");
  if (cfg.randomized)
    throw std::invalid_argument(
        "solve_robust: the randomized sketch is not supported here; compressing rows mixes "
        "entrywise spikes across observations and destroys the sparse outlier model");
  if (cfg.fista)
    throw std::invalid_argument("solve_robust: momentum is not supported for the robust cycle");
  if (cfg.init_loadings) {
    if (cfg.init_loadings->rows() != x.cols() || cfg.init_loadings->cols() != cfg.rank)
      throw std::invalid_argument("solve_robust: init_loadings must be " +
                                  std::to_string(x.cols()) + " x " + std::to_string(cfg.rank));
    require_finite(*cfg.init_loadings, "solve_robust: init_loadings");
  }
}

}  // namespace

double huber_loss(double x, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("huber_loss: kappa must be positive");
  double ax = std::abs(x);
  if (ax <= kappa) return 0.5 * x * x;
  return kappa * ax - 0.5 * kappa * kappa;
}

double huber_loss(const Matrix& m, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("huber_loss: kappa must be positive");
  double total = 0.0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      double ax = std::abs(m(i, j));
      total += ax <= kappa ? 0.5 * ax * ax : kappa * ax - 0.5 * kappa * kappa;
    }
  return total;
}

double default_huber_kappa(const Matrix& x, Index rank) {
  if (x.size() == 0) throw std::invalid_argument("default_huber_kappa: input matrix is empty");
  Index top = std::min(x.rows(), x.cols());
  if (rank < 1 || rank > top)
    throw std::invalid_argument("default_huber_kappa: rank must be in [1, " +
                                std::to_string(top) + "]");
  require_finite(x, "default_huber_kappa: input matrix");

  Matrix v = top_right_singular_vectors(x, rank);
  Matrix residual = x - (x * v) * v.transpose();

  std::vector<double> cells(static_cast<std::size_t>(residual.size()));
  Eigen::Map<Matrix>(cells.data(), residual.rows(), residual.cols()) = residual;
  double med = median_inplace(cells);
  for (double& c : cells) c = std::abs(c - med);
  double mad = median_inplace(cells);

  double kappa = kHuberEfficiency * kMadToSigma * mad;
  double floor = 1e-12 * std::max(1.0, x.cwiseAbs().maxCoeff());
  return std::max(kappa, floor);
}

SpcaResult solve_robust(const Matrix& x, const SolverConfig& cfg) {
  validate(x, cfg);

  const Index k = cfg.rank;
  const double kappa = cfg.huber_kappa ? *cfg.huber_kappa : default_huber_kappa(x, k);
  const double gamma =
      cfg.step_size ? *cfg.step_size
                    : 1.0 / ((1.0 + kSpectralTol) * spectral_norm_sq(x, kSpectralTol));

  Matrix b, a;
  if (cfg.init_loadings) {
    b = *cfg.init_loadings;
    a = procrustes_update(x, b);
  } else {
    b = top_right_singular_vectors(x, k);
    a = b;
  }
  Matrix s = Matrix::Zero(x.rows(), x.cols());
  double obj = 0.5 * (x - (x * b) * a.transpose()).squaredNorm() + eval_psi(cfg.regularizer, b);

  SpcaResult res;
  res.step_size = gamma;
  res.huber_kappa = kappa;
  res.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter) + 1);
  res.stationarity_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
  res.objective_trace.push_back(obj);

  for (int it = 1; it <= cfg.max_iter; ++it) {
    // One prox-gradient step on b holding (a, s); a and s then get their
    // exact block minimizers, so every cycle decreases the objective.
    Matrix xs = x - s;
    Matrix g = x.transpose() * (x * b) - x.transpose() * (xs * a);
    Matrix bn = prox(cfg.regularizer, b - gamma * g, gamma);
    Matrix zn = x * bn;
    Matrix an = polar_factor(xs.transpose() * zn);
    Matrix recon = zn * an.transpose();
    Matrix sn = soft_threshold(x - recon, kappa);

    double objn = 0.5 * (x - recon - sn).squaredNorm() + kappa * sn.cwiseAbs().sum() +
                  eval_psi(cfg.regularizer, bn);
    if (!std::isfinite(objn) || !bn.allFinite())
      throw numerical_error("solve_robust: non-finite update at iteration " +
                            std::to_string(it));

    double t_stat = ((b - bn).squaredNorm() + (s - sn).squaredNorm()) / (gamma * gamma);
    res.objective_trace.push_back(objn);
    res.stationarity_trace.push_back(t_stat);
    res.iterations = it;

    double prev = obj;
    b.swap(bn);
    a.swap(an);
    s.swap(sn);
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
  res.s = std::move(s);
  return res;
}

double objective_robust(const Matrix& x, const Matrix& a, const Matrix& b, const Matrix& s,
                        const RegularizerSpec& spec, double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("objective_robust: kappa must be positive");
  if (b.rows() != x.cols() || a.rows() != x.cols() || a.cols() != b.cols())
    throw std::invalid_argument("objective_robust: factor shapes do not match the data");
  if (s.rows() != x.rows() || s.cols() != x.cols())
    throw std::invalid_argument("objective_robust: spike matrix must match the data shape");
  double quad = 0.5 * (x - (x * b) * a.transpose() - s).squaredNorm();
  return quad + kappa * s.cwiseAbs().sum() + eval_psi(spec, b);
}

}  // namespace spca
