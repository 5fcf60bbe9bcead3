#include "spca/procrustes.hpp"

namespace spca {

Matrix polar_factor(const Matrix& m) {
  if (m.size() == 0) throw std::invalid_argument("polar_factor: empty matrix");
  // Jacobi keeps thin U and V orthonormal even for rank-deficient m, so the
  // product is always a valid orthonormal factor; m is p x k with small k.
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Matrix procrustes_update(const Matrix& x, const Matrix& b) {
  return polar_factor(x.transpose() * (x * b));
}

Matrix procrustes_update(const Matrix& x, const Matrix& b, const Matrix& s) {
  Matrix xb = x * b;
  return polar_factor(x.transpose() * xb - s.transpose() * xb);
}

}  // namespace spca
