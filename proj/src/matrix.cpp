#include "spca/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace spca {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

ThinSvd thin_svd(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("thin_svd: empty matrix");
  // Divide-and-conquer for larger inputs, one-sided Jacobi below its internal
  // crossover; both are deterministic for a fixed input.
  if (std::min(m.rows(), m.cols()) < 16) {
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
      throw numerical_error("thin_svd failed to converge on a " + shape_of(m) + " matrix");
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
  }
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw numerical_error("thin_svd failed to converge on a " + shape_of(m) + " matrix");
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

QrOrthonormal qr_orthonormal(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("qr_orthonormal: empty matrix");
  const Index r = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Matrix> qr(m);
  QrOrthonormal out;
  out.q = qr.householderQ() * Matrix::Identity(m.rows(), r);
  // Unpivoted R diagonal is enough for a rank report; exact dependencies
  // (duplicated or zero columns) show up as (near-)zero entries.
  Vector diag = qr.matrixQR().diagonal().cwiseAbs();
  double dmax = diag.size() > 0 ? diag.maxCoeff() : 0.0;
  double tol = dmax * static_cast<double>(std::max(m.rows(), m.cols())) *
               std::numeric_limits<double>::epsilon();
  out.rank = 0;
  for (Index i = 0; i < r; ++i)
    if (diag(i) > tol) ++out.rank;
  if (dmax == 0.0) out.rank = 0;
  return out;
}

double spectral_norm_sq(const Matrix& m, double tol, int max_iter) {
  if (m.size() == 0) throw std::invalid_argument("spectral_norm_sq: empty matrix");
  if (!(tol > 0.0)) throw std::invalid_argument("spectral_norm_sq: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("spectral_norm_sq: max_iter must be >= 1");
  if (m.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("spectral_norm_sq: zero matrix has no dominant direction");

  std::mt19937_64 rng(0x5ca1ab1eULL);  // fixed seed: deterministic for fixed input
  std::normal_distribution<double> nd;
  Vector v(m.cols());
  auto refill = [&] {
    do {
      for (Index i = 0; i < v.size(); ++i) v(i) = nd(rng);
    } while (v.norm() == 0.0);
    v /= v.norm();
  };
  refill();

  // The Rayleigh quotient v^T (m^T m) v converges from below, so the estimate
  // never overshoots. The successive-change cutoff is well under tol to keep
  // the true relative error within tol at moderate spectral gaps.
  double lambda = 0.0;
  const double cutoff = tol * 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    Vector w = m.transpose() * (m * v);
    double nw = w.norm();
    if (nw == 0.0) {  // landed exactly in the null space; restart
      refill();
      continue;
    }
    double next = v.dot(w);
    v = w / nw;
    if (it > 0 && std::abs(next - lambda) <= cutoff * next) return next;
    lambda = next;
  }
  return lambda;
}

Matrix top_right_singular_vectors(const Matrix& m, Index k) {
  const Index n = m.rows();
  const Index p = m.cols();
  const Index r = std::min(n, p);
  if (m.size() == 0) throw std::invalid_argument("top_right_singular_vectors: empty matrix");
  if (k < 1 || k > r)
    throw std::invalid_argument("top_right_singular_vectors: k = " + std::to_string(k) +
                                " out of range for a " + shape_of(m) + " matrix");
  if (r <= 400) return thin_svd(m).v.leftCols(k);

  // Gram route: eigenvectors of the smaller normal matrix. Costs O(min^2 max)
  // with a small constant, instead of a full SVD of m.
  if (n <= p) {
    Matrix c = Matrix::Zero(n, n);
    c.selfadjointView<Eigen::Lower>().rankUpdate(m);  // c = m m^T
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    if (es.info() != Eigen::Success)
      throw numerical_error("top_right_singular_vectors: eigensolver failed on " + shape_of(m));
    double lmax = std::max(es.eigenvalues()(n - 1), 0.0);
    Matrix v = Matrix::Zero(p, k);
    for (Index j = 0; j < k; ++j) {
      double lambda = es.eigenvalues()(n - 1 - j);
      if (lambda <= lmax * 1e-24 || lambda <= 0.0) continue;  // null direction: leave zero
      v.col(j) = m.transpose() * es.eigenvectors().col(n - 1 - j) / std::sqrt(lambda);
    }
    // QR cleans the O(eps * lmax/gap) drift from the Gram mapping and
    // deterministically completes any zeroed columns.
    return qr_orthonormal(v).q;
  }
  Matrix c = Matrix::Zero(p, p);
  c.selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());  // c = m^T m
  Eigen::SelfAdjointEigenSolver<Matrix> es(c);
  if (es.info() != Eigen::Success)
    throw numerical_error("top_right_singular_vectors: eigensolver failed on " + shape_of(m));
  Matrix v(p, k);
  for (Index j = 0; j < k; ++j) v.col(j) = es.eigenvectors().col(p - 1 - j);
  return v;
}

void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite())
    throw std::invalid_argument(what + " contains non-finite values (" + shape_of(m) +
                                " matrix)");
}

}  // namespace spca
