#include "schatten/operators.hpp"

#include <cmath>
#include <random>
#include <string>

namespace schatten {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string shape(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void check_shape(const Matrix& M, Eigen::Index r, Eigen::Index c, const char* what) {
  if (M.rows() != r || M.cols() != c)
    throw DimensionError(std::string(what) + ": expected " + shape(r, c) + ", got " +
                         shape(M.rows(), M.cols()));
}

}  // namespace

LinearMap::LinearMap(Eigen::Index rows, Eigen::Index cols, LeftMultiply op)
    : rows_(rows), cols_(cols), op_(std::move(op)) {
  validate();
}

LinearMap::LinearMap(Eigen::Index rows, Eigen::Index cols, EntryMask op)
    : rows_(rows), cols_(cols), op_(std::move(op)) {
  validate();
}

LinearMap::LinearMap(Eigen::Index rows, Eigen::Index cols, DenseGeneral op)
    : rows_(rows), cols_(cols), op_(std::move(op)) {
  validate();
}

LinearMap LinearMap::identity(Eigen::Index rows, Eigen::Index cols) {
  SparseMatrix I(rows, rows);
  I.setIdentity();
  return LinearMap(rows, cols, LeftMultiply{std::move(I)});
}

void LinearMap::validate() const {
  if (rows_ <= 0 || cols_ <= 0) throw DimensionError("linear map domain must be non-empty");
  std::visit(overloaded{
                 [&](const LeftMultiply& op) {
                   const Eigen::Index ac =
                       std::visit([](const auto& A) { return A.cols(); }, op.A);
                   if (ac != rows_)
                     throw DimensionError("left factor has " + std::to_string(ac) +
                                          " columns, domain has " + std::to_string(rows_) +
                                          " rows");
                 },
                 [&](const EntryMask& op) {
                   for (const auto& [i, j] : op.entries)
                     if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
                       throw DimensionError("mask entry out of range");
                 },
                 [&](const DenseGeneral& op) {
                   if (op.T.cols() != rows_ * cols_)
                     throw DimensionError("dense operator expects " +
                                          std::to_string(rows_ * cols_) + " columns");
                 },
             },
             op_);
}

Eigen::Index LinearMap::codomain_rows() const {
  return std::visit(
      overloaded{
          [](const LeftMultiply& op) {
            return std::visit([](const auto& A) { return A.rows(); }, op.A);
          },
          [](const EntryMask& op) { return static_cast<Eigen::Index>(op.entries.size()); },
          [](const DenseGeneral& op) { return op.T.rows(); },
      },
      op_);
}

Eigen::Index LinearMap::codomain_cols() const {
  return std::holds_alternative<LeftMultiply>(op_) ? cols_ : 1;
}

Matrix LinearMap::apply(const Matrix& X) const {
  check_shape(X, rows_, cols_, "apply");
  return std::visit(
      overloaded{
          [&](const LeftMultiply& op) {
            return std::visit([&](const auto& A) -> Matrix { return A * X; }, op.A);
          },
          [&](const EntryMask& op) {
            Matrix y(static_cast<Eigen::Index>(op.entries.size()), 1);
            for (std::size_t k = 0; k < op.entries.size(); ++k)
              y(static_cast<Eigen::Index>(k), 0) = X(op.entries[k].first, op.entries[k].second);
            return y;
          },
          [&](const DenseGeneral& op) {
            return Matrix(op.T * X.reshaped());
          },
      },
      op_);
}

Matrix LinearMap::adjoint(const Matrix& Y) const {
  check_shape(Y, codomain_rows(), codomain_cols(), "adjoint");
  return std::visit(
      overloaded{
          [&](const LeftMultiply& op) {
            return std::visit([&](const auto& A) -> Matrix { return A.transpose() * Y; }, op.A);
          },
          [&](const EntryMask& op) {
            Matrix X = Matrix::Zero(rows_, cols_);
            for (std::size_t k = 0; k < op.entries.size(); ++k)
              X(op.entries[k].first, op.entries[k].second) += Y(static_cast<Eigen::Index>(k), 0);
            return X;
          },
          [&](const DenseGeneral& op) {
            Vector v = op.T.transpose() * Y.col(0);
            return Matrix(v.reshaped(rows_, cols_));
          },
      },
      op_);
}

OpNormEstimate op_norm_AtA(const LinearMap& map, const PowerOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Matrix X(map.rows(), map.cols());
  for (Eigen::Index k = 0; k < X.size(); ++k) X.data()[k] = gauss(rng);
  X /= X.norm();

  OpNormEstimate out;
  double prev = 0.0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    Matrix Y = map.adjoint(map.apply(X));
    const double rayleigh = (X.array() * Y.array()).sum();
    const double ny = Y.norm();
    out.iterations = it;
    if (ny == 0.0) {
      out.value = 0.0;
      out.converged = true;
      out.direction = X;
      return out;
    }
    out.value = rayleigh;
    out.direction = X;
    X = Y / ny;
    if (it > 1 && std::abs(rayleigh - prev) <= opts.tol * std::abs(rayleigh)) {
      out.converged = true;
      break;
    }
    prev = rayleigh;
  }
  return out;
}

Matrix grad_f(const LinearMap& map, const Matrix& b, const Matrix& X) {
  check_shape(b, map.codomain_rows(), map.codomain_cols(), "grad_f");
  return map.adjoint(map.apply(X) - b);
}

}  // namespace schatten
