#pragma once

#include "schatten/types.hpp"

#include <utility>

namespace schatten {

// Square matrix with X^T = -X to within an absolute 1e-12.
class SkewMatrix {
 public:
  explicit SkewMatrix(Matrix X);
  // Antisymmetric part 0.5 (X - X^T); always exactly skew.
  static SkewMatrix skew_part(const Matrix& X);

  const Matrix& matrix() const { return X_; }
  Eigen::Index size() const { return X_.rows(); }
  double norm() const { return X_.norm(); }

 private:
  struct Unchecked {};
  SkewMatrix(Matrix X, Unchecked) : X_(std::move(X)) {}
  Matrix X_;
};

enum class CayleySolve { DirectLU, FixedPoint };

// (I + X/2)(I - X/2)^{-1}
Matrix cayley(const SkewMatrix& X);

// Q C(E), computed from (I + E/2) Y^T = (I - E/2) Q^T.
Matrix cayley_update(const Matrix& Q, const SkewMatrix& E,
                     CayleySolve mode = CayleySolve::DirectLU);

Matrix matrix_exp(const Matrix& X);
// Principal logarithm; requires ||X - I||_F < 1.
Matrix matrix_log(const Matrix& X);

double orthogonality_error(const Matrix& Q);  // ||Q^T Q - I||_F

// Polar factor of Q by Newton-Schulz iteration; Q must be near orthogonal.
Matrix reorthonormalize(const Matrix& Q);

}  // namespace schatten
