#pragma once

#include "spca/matrix.hpp"

namespace spca {

// Orthonormal polar factor u * v^T of m; maximizes trace(m^T a) over all a
// with a^T a = I. Rank-deficient m (even m = 0) still yields orthonormal
// columns, completed deterministically by the SVD.
Matrix polar_factor(const Matrix& m);

// Orthonormal update a = polar_factor(x^T (x b)); the overload with s uses
// (x - s)^T (x b). Products associate as x^T * (x * b) so no p x p
// intermediate is ever formed.
Matrix procrustes_update(const Matrix& x, const Matrix& b);
Matrix procrustes_update(const Matrix& x, const Matrix& b, const Matrix& s);

}  // namespace spca
