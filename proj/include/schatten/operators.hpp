#pragma once

#include "schatten/types.hpp"

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

namespace schatten {

// X -> A X, with A stored sparse or dense. Codomain is l x n.
struct LeftMultiply {
  std::variant<SparseMatrix, Matrix> A;
};

// X -> (X_ij)_{(i,j) in Omega}. Codomain is |Omega| x 1.
struct EntryMask {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> entries;
};

// X -> T vec(X) with column-major vec. Codomain is l x 1.
struct DenseGeneral {
  Matrix T;
};

class LinearMap {
 public:
  LinearMap(Eigen::Index rows, Eigen::Index cols, LeftMultiply op);
  LinearMap(Eigen::Index rows, Eigen::Index cols, EntryMask op);
  LinearMap(Eigen::Index rows, Eigen::Index cols, DenseGeneral op);

  static LinearMap identity(Eigen::Index rows, Eigen::Index cols);

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  Eigen::Index codomain_rows() const;
  Eigen::Index codomain_cols() const;

  Matrix apply(const Matrix& X) const;
  Matrix adjoint(const Matrix& Y) const;

 private:
  void validate() const;

  Eigen::Index rows_;
  Eigen::Index cols_;
  std::variant<LeftMultiply, EntryMask, DenseGeneral> op_;
};

struct PowerOptions {
  double tol = 1e-8;
  int max_iter = 1000;
  std::uint64_t seed = 0;
};

struct OpNormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  Matrix direction;  // unit Frobenius norm
};

// Power iteration on X -> A*(A(X)).
OpNormEstimate op_norm_AtA(const LinearMap& map, const PowerOptions& opts = {});

// G = A*(A(X) - b)
Matrix grad_f(const LinearMap& map, const Matrix& b, const Matrix& X);

}  // namespace schatten
