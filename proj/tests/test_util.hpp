#pragma once

// Shared generators and oracles for the test suite. Oracles call Eigen
// directly (never the library under test) so each check has an independent
// reference.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace testutil {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
  return m;
}

inline Matrix random_orthonormal(Index rows, Index cols, std::uint64_t seed) {
  Matrix g = gaussian(rows, cols, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

// u * diag(sigma) * v^T with orthonormal factors; rank = sigma.size().
inline Matrix matrix_with_spectrum(Index rows, Index cols, const std::vector<double>& sigma,
                                   std::uint64_t seed) {
  const Index r = static_cast<Index>(sigma.size());
  Matrix u = random_orthonormal(rows, r, seed * 2 + 1);
  Matrix v = random_orthonormal(cols, r, seed * 2 + 2);
  Vector s(r);
  for (Index i = 0; i < r; ++i) s(i) = sigma[static_cast<std::size_t>(i)];
  return u * s.asDiagonal() * v.transpose();
}

inline Vector singular_values_oracle(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues();
}

// Orthonormal maximizer of trace(m^T a), computed straight from Eigen's SVD.
inline Matrix polar_oracle(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

// 0.5 * ||x - x b a(b)^T||_F^2 with a(b) from the oracle polar factor; the
// reference implementation of the variable-projection value.
inline double value_oracle(const Matrix& x, const Matrix& b) {
  Matrix a = polar_oracle(x.transpose() * (x * b));
  return 0.5 * (x - x * b * a.transpose()).squaredNorm();
}

// Largest principal angle (radians) between the column spans of u and w.
inline double max_principal_angle(const Matrix& u, const Matrix& w) {
  Eigen::HouseholderQR<Matrix> qu(u), qw(w);
  Matrix quq = qu.householderQ() * Matrix::Identity(u.rows(), u.cols());
  Matrix qwq = qw.householderQ() * Matrix::Identity(w.rows(), w.cols());
  Vector c = Eigen::JacobiSVD<Matrix>(quq.transpose() * qwq).singularValues();
  double cmin = std::clamp(c(c.size() - 1), -1.0, 1.0);
  return std::acos(cmin);
}

// Argmin of f over {lo, lo + step, ..., hi}; ties keep the first hit.
template <class F>
double grid_minimize(F&& f, double lo, double hi, double step) {
  double best_z = lo;
  double best_f = f(lo);
  for (double z = lo + step; z <= hi + step / 2; z += step) {
    double fz = f(z);
    if (fz < best_f) {
      best_f = fz;
      best_z = z;
    }
  }
  return best_z;
}

inline bool bitwise_equal(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

}  // namespace testutil
