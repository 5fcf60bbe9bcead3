#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace spca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Raised when an iteration or factorization produces non-finite values or
// fails to converge; the CLI maps it to exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thin SVD m = u * sigma.asDiagonal() * v.transpose() with r = min(rows, cols)
// columns; sigma is nonnegative and nonincreasing.
struct ThinSvd {
  Matrix u;
  Vector sigma;
  Matrix v;
};
ThinSvd thin_svd(const Matrix& m);

// Orthonormal q with the same shape as m whose range contains range(m); rank
// is estimated from the diagonal of the triangular factor. Rank-deficient
// input still yields orthonormal columns (deterministic completion).
struct QrOrthonormal {
  Matrix q;
  Index rank = 0;
};
QrOrthonormal qr_orthonormal(const Matrix& m);

// ||m||_2^2 by power iteration applied to m^T m (never formed explicitly).
// The Rayleigh quotient is a lower estimate, so the result never overshoots
// the true value; relative accuracy is ~tol. Throws on a zero matrix.
double spectral_norm_sq(const Matrix& m, double tol = 1e-6, int max_iter = 500);

// Top-k right singular vectors as an orthonormal p x k matrix. Small inputs
// go through thin_svd; large ones through the Gram eigenproblem on the
// smaller side, which is much cheaper and accurate enough for a warm start.
Matrix top_right_singular_vectors(const Matrix& m, Index k);

// Throws std::invalid_argument naming `what` if any entry is NaN/Inf.
void require_finite(const Matrix& m, const std::string& what);

}  // namespace spca
