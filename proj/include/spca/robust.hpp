#pragma once

#include "spca/solver.hpp"

namespace spca {

// Huber penalty: x^2 / 2 for |x| <= kappa, kappa * |x| - kappa^2 / 2 beyond.
double huber_loss(double x, double kappa);
double huber_loss(const Matrix& m, double kappa);  // elementwise sum

// kappa = 1.345 * 1.4826 * MAD of the rank-k PCA residual of x, floored away
// from zero for exactly low-rank inputs.
double default_huber_kappa(const Matrix& x, Index rank);

// Alternating scheme for 0.5 * ||x - x b a^T - s||_F^2 + psi(b) + kappa * ||s||_1:
// proximal-gradient step in b, orthonormal Procrustes update of a against
// x - s, exact soft-threshold update of s. Every cycle decreases the
// objective; s starts at zero.
SpcaResult solve_robust(const Matrix& x, const SolverConfig& config);

double objective_robust(const Matrix& x, const Matrix& a, const Matrix& b,
                        const Matrix& s, const RegularizerSpec& spec, double kappa);

}  // namespace spca
