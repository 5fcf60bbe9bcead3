#pragma once

#include "spca/matrix.hpp"

#include <string>
#include <vector>

namespace spca {

enum class Regularizer { none, l0, l1, l0_ridge, l1_ridge, group_lasso };

const char* to_string(Regularizer kind);
Regularizer regularizer_from_string(const std::string& name);

struct RegularizerSpec {
  Regularizer kind = Regularizer::none;
  double alpha = 0.0;  // sparsity weight
  double beta = 0.0;   // ridge weight; only l0_ridge / l1_ridge may set it
  // Partition of the row indices 0..rows-1; group_lasso only.
  std::vector<std::vector<Index>> groups;

  // Throws std::invalid_argument on negative weights, beta on a non-ridge
  // kind, or groups that are not a partition of 0..rows-1.
  void validate(Index rows) const;
};

// prox_{gamma * psi}(x), elementwise for the scalar penalties and per column
// block for the group penalty. Thresholding ties resolve to zero.
Matrix prox(const RegularizerSpec& spec, const Matrix& x, double gamma);

// psi(b). Zero counts compare exactly; prox output carries exact zeros.
double eval_psi(const RegularizerSpec& spec, const Matrix& b);

}  // namespace spca
