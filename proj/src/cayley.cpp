#include "schatten/cayley.hpp"

#include <Eigen/LU>

#include <cmath>
#include <string>

namespace schatten {

namespace {

void require_square(const Matrix& X, const char* what) {
  if (X.rows() != X.cols())
    throw DimensionError(std::string(what) + ": matrix is not square");
}

}  // namespace

SkewMatrix::SkewMatrix(Matrix X) : X_(std::move(X)) {
  require_square(X_, "SkewMatrix");
  const double dev = (X_ + X_.transpose()).cwiseAbs().maxCoeff();
  if (X_.size() > 0 && dev > 1e-12)
    throw InvariantViolation("matrix is not skew-symmetric (deviation " + std::to_string(dev) + ")");
}

SkewMatrix SkewMatrix::skew_part(const Matrix& X) {
  require_square(X, "skew_part");
  return SkewMatrix(0.5 * (X - X.transpose()), Unchecked{});
}

Matrix cayley(const SkewMatrix& X) {
  const Eigen::Index n = X.size();
  const Matrix I = Matrix::Identity(n, n);
  // (I - X/2)^{-1} and (I + X/2) commute.
  return (I - 0.5 * X.matrix()).partialPivLu().solve(I + 0.5 * X.matrix());
}

Matrix cayley_update(const Matrix& Q, const SkewMatrix& E, CayleySolve mode) {
  const Eigen::Index n = E.size();
  if (Q.rows() != n || Q.cols() != n) throw DimensionError("cayley_update: shape mismatch");
  const Matrix& S = E.matrix();
  const Matrix rhs = Q.transpose() - 0.5 * (S * Q.transpose());
  if (mode == CayleySolve::DirectLU) {
    const Matrix I = Matrix::Identity(n, n);
    return (I + 0.5 * S).partialPivLu().solve(rhs).transpose();
  }
  // Y = rhs - S Y / 2 contracts when ||S||_2 < 2.
  if (E.norm() >= 2.0) throw DomainError("fixed-point Cayley solve needs ||E||_F < 2");
  Matrix Y = rhs;
  const double scale = std::max(1.0, rhs.norm());
  for (int it = 0; it < 500; ++it) {
    Matrix next = rhs - 0.5 * (S * Y);
    const double change = (next - Y).norm();
    Y.swap(next);
    if (change <= 1e-15 * scale) return Y.transpose();
  }
  throw NumericalFailure("fixed-point Cayley solve did not converge");
}

Matrix matrix_exp(const Matrix& X) {
  require_square(X, "matrix_exp");
  const Eigen::Index n = X.rows();
  const double nrm = X.norm();
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const Matrix A = X / std::ldexp(1.0, squarings);
  Matrix term = Matrix::Identity(n, n);
  Matrix sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * A / static_cast<double>(k);
    sum += term;
    if (term.norm() <= 1e-17 * sum.norm()) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

Matrix matrix_log(const Matrix& X) {
  require_square(X, "matrix_log");
  const Eigen::Index n = X.rows();
  const Matrix I = Matrix::Identity(n, n);
  if (!((X - I).norm() < 1.0)) throw DomainError("matrix_log needs ||X - I||_F < 1");

  // Inverse scaling: Denman-Beavers square roots until close to I.
  Matrix Y = X;
  int roots = 0;
  while ((Y - I).norm() > 0.25 && roots < 30) {
    Matrix Z = I;
    for (int it = 0; it < 50; ++it) {
      const Matrix Yn = 0.5 * (Y + Z.inverse());
      const Matrix Zn = 0.5 * (Z + Y.inverse());
      const double change = (Yn - Y).norm();
      Y = Yn;
      Z = Zn;
      if (change <= 1e-15 * Y.norm()) break;
    }
    ++roots;
  }

  const Matrix D = Y - I;
  Matrix power = D;
  Matrix sum = D;
  for (int k = 2; k < 200; ++k) {
    power = power * D;
    const Matrix term = power / static_cast<double>(k);
    if (k % 2 == 0)
      sum -= term;
    else
      sum += term;
    if (term.norm() <= 1e-17 * std::max(1e-300, sum.norm())) break;
  }
  return std::ldexp(1.0, roots) * sum;
}

double orthogonality_error(const Matrix& Q) {
  return (Q.transpose() * Q - Matrix::Identity(Q.cols(), Q.cols())).norm();
}

Matrix reorthonormalize(const Matrix& Q) {
  require_square(Q, "reorthonormalize");
  const Matrix I = Matrix::Identity(Q.rows(), Q.cols());
  Matrix Y = Q;
  for (int it = 0; it < 50; ++it) {
    const Matrix G = Y.transpose() * Y;
    if ((G - I).norm() <= 1e-15 * std::sqrt(static_cast<double>(Q.rows()))) break;
    Y = Y * (1.5 * I - 0.5 * G);
  }
  return Y;
}

}  // namespace schatten
