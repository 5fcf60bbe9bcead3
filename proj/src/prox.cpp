#include "spca/prox.hpp"

#include <algorithm>
#include <cmath>

namespace spca {

const char* to_string(Regularizer kind) {
  switch (kind) {
    case Regularizer::none: return "none";
    case Regularizer::l0: return "l0";
    case Regularizer::l1: return "l1";
    case Regularizer::l0_ridge: return "l0l2";
    case Regularizer::l1_ridge: return "l1l2";
    case Regularizer::group_lasso: return "group";
  }
  return "none";
}

Regularizer regularizer_from_string(const std::string& name) {
  if (name == "none") return Regularizer::none;
  if (name == "l0") return Regularizer::l0;
  if (name == "l1") return Regularizer::l1;
  if (name == "l0l2") return Regularizer::l0_ridge;
  if (name == "l1l2") return Regularizer::l1_ridge;
  if (name == "group") return Regularizer::group_lasso;
  throw std::invalid_argument("unknown regularizer '" + name +
                              "'; expected none|l0|l1|l0l2|l1l2|group");
}

void RegularizerSpec::validate(Index rows) const {
  if (!(alpha >= 0.0)) throw std::invalid_argument("regularizer: alpha must be >= 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("regularizer: beta must be >= 0");
  const bool ridge = kind == Regularizer::l0_ridge || kind == Regularizer::l1_ridge;
  if (beta != 0.0 && !ridge)
    throw std::invalid_argument("regularizer: beta is only valid for l0l2/l1l2");
  if (kind == Regularizer::group_lasso) {
    if (groups.empty())
      throw std::invalid_argument("regularizer: group penalty requires groups");
    std::vector<char> seen(static_cast<std::size_t>(rows), 0);
    for (const auto& g : groups) {
      if (g.empty()) throw std::invalid_argument("regularizer: empty group");
      for (Index i : g) {
        if (i < 0 || i >= rows)
          throw std::invalid_argument("regularizer: group index " + std::to_string(i) +
                                      " out of range for " + std::to_string(rows) + " rows");
        if (seen[static_cast<std::size_t>(i)])
          throw std::invalid_argument("regularizer: row " + std::to_string(i) +
                                      " appears in more than one group");
        seen[static_cast<std::size_t>(i)] = 1;
      }
    }
    for (Index i = 0; i < rows; ++i)
      if (!seen[static_cast<std::size_t>(i)])
        throw std::invalid_argument("regularizer: row " + std::to_string(i) +
                                    " is not covered by any group");
  } else if (!groups.empty()) {
    throw std::invalid_argument("regularizer: groups are only valid with the group penalty");
  }
}

Matrix prox(const RegularizerSpec& spec, const Matrix& x, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("prox: gamma must be positive");
  spec.validate(x.rows());
  const double a = spec.alpha;
  const double b = spec.beta;
  Matrix out = x;
  switch (spec.kind) {
    case Regularizer::none:
      return out;
    case Regularizer::l0: {
      const double cut = 2.0 * gamma * a;  // keep when x^2 > cut; ties collapse
      for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i)
          if (out(i, j) * out(i, j) <= cut) out(i, j) = 0.0;
      return out;
    }
    case Regularizer::l1: {
      const double t = gamma * a;
      for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) {
          double v = out(i, j);
          out(i, j) = v > t ? v - t : (v < -t ? v + t : 0.0);
        }
      return out;
    }
    case Regularizer::l0_ridge: {
      const double scale = 1.0 + 2.0 * gamma * b;
      const double cut = 2.0 * gamma * a * scale;
      for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) {
          double v = out(i, j);
          out(i, j) = v * v > cut ? v / scale : 0.0;
        }
      return out;
    }
    case Regularizer::l1_ridge: {
      const double t = gamma * a;
      const double scale = 1.0 + 2.0 * gamma * b;
      for (Index j = 0; j < out.cols(); ++j)
        for (Index i = 0; i < out.rows(); ++i) {
          double v = out(i, j);
          out(i, j) = v > t ? (v - t) / scale : (v < -t ? (v + t) / scale : 0.0);
        }
      return out;
    }
    case Regularizer::group_lasso: {
      const double t = gamma * a;
      for (Index j = 0; j < out.cols(); ++j) {
        for (const auto& g : spec.groups) {
          double nrm = 0.0;
          for (Index i : g) nrm += x(i, j) * x(i, j);
          nrm = std::sqrt(nrm);
          if (nrm > t) {
            const double scale = 1.0 - t / nrm;
            for (Index i : g) out(i, j) = x(i, j) * scale;
          } else {
            for (Index i : g) out(i, j) = 0.0;
          }
        }
      }
      return out;
    }
  }
  return out;
}

double eval_psi(const RegularizerSpec& spec, const Matrix& b) {
  spec.validate(b.rows());
  switch (spec.kind) {
    case Regularizer::none:
      return 0.0;
    case Regularizer::l0: {
      Index nnz = 0;
      for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < b.rows(); ++i)
          if (b(i, j) != 0.0) ++nnz;
      return spec.alpha * static_cast<double>(nnz);
    }
    case Regularizer::l1:
      return spec.alpha * b.cwiseAbs().sum();
    case Regularizer::l0_ridge: {
      Index nnz = 0;
      for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < b.rows(); ++i)
          if (b(i, j) != 0.0) ++nnz;
      return spec.alpha * static_cast<double>(nnz) + spec.beta * b.squaredNorm();
    }
    case Regularizer::l1_ridge:
      return spec.alpha * b.cwiseAbs().sum() + spec.beta * b.squaredNorm();
    case Regularizer::group_lasso: {
      double total = 0.0;
      for (Index j = 0; j < b.cols(); ++j) {
        for (const auto& g : spec.groups) {
          double nrm = 0.0;
          for (Index i : g) nrm += b(i, j) * b(i, j);
          total += std::sqrt(nrm);
        }
      }
      return spec.alpha * total;
    }
  }
  return 0.0;
}

}  // namespace spca
